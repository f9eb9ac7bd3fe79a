#include "corrnet/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "corrnet/errors.hpp"

namespace corrnet {

training::TrainConfig GlobalConfig::train_config() const {
  training::TrainConfig t = train;
  t.seed = seed;
  t.oov = oov;
  return t;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ArgumentError("bad value '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ArgumentError("bad boolean '" + value + "' for " + key);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_value(GlobalConfig& c, const std::string& key, const std::string& value) {
  auto& t = c.train;
  if (key == "lowercase") c.normalization.lowercase = parse_bool(key, value);
  else if (key == "strip_punctuation") c.normalization.strip_punctuation = parse_bool(key, value);
  else if (key == "max_tokens") c.normalization.max_tokens = parse_number<std::size_t>(key, value);
  else if (key == "embeddings") c.embeddings = value;
  else if (key == "oov") c.oov = parse_oov_policy(value);
  else if (key == "hidden_size") t.hidden_size = parse_number<std::size_t>(key, value);
  else if (key == "head_width") t.head_width = parse_number<std::size_t>(key, value);
  else if (key == "epochs") t.epochs = parse_number<std::size_t>(key, value);
  else if (key == "learning_rate") t.learning_rate = parse_number<double>(key, value);
  else if (key == "adam_beta1") t.adam_beta1 = parse_number<double>(key, value);
  else if (key == "adam_beta2") t.adam_beta2 = parse_number<double>(key, value);
  else if (key == "adam_epsilon") t.adam_epsilon = parse_number<double>(key, value);
  else if (key == "grad_clip") t.grad_clip = parse_number<double>(key, value);
  else if (key == "batch_size") t.batch_size = parse_number<std::size_t>(key, value);
  else if (key == "early_stop_patience") t.early_stop_patience = parse_number<std::size_t>(key, value);
  else if (key == "validation_fraction") t.validation_fraction = parse_number<double>(key, value);
  else if (key == "train_fraction") c.train_fraction = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "members") c.members = parse_number<std::size_t>(key, value);
  else if (key == "bagging") c.bagging = parse_bool(key, value);
  else if (key == "candidates") c.candidates = parse_number<std::size_t>(key, value);
  else if (key == "top_fraction") c.top_fraction = parse_number<double>(key, value);
  else if (key == "jobs") c.jobs = parse_number<std::size_t>(key, value);
  else if (key == "baseline_pooling") {
    if (value == "pooled") c.baseline_pooling = baseline::Pooling::Pooled;
    else if (value == "equal") c.baseline_pooling = baseline::Pooling::EqualWeight;
    else throw ArgumentError("baseline_pooling must be 'pooled' or 'equal'");
  } else {
    throw ArgumentError("unknown config key '" + key + "'");
  }
}

void apply_config_file(GlobalConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw FormatError(path.string(), line_no, "expected key = value");
    try {
      apply_config_value(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ArgumentError& e) {
      throw FormatError(path.string(), line_no, e.what());
    }
  }
}

std::string dump_config(const GlobalConfig& c) {
  const auto& t = c.train;
  std::ostringstream out;
  out.precision(17);
  out << std::boolalpha;
  out << "lowercase = " << c.normalization.lowercase << '\n'
      << "strip_punctuation = " << c.normalization.strip_punctuation << '\n'
      << "max_tokens = " << c.normalization.max_tokens << '\n'
      << "embeddings = " << c.embeddings << '\n'
      << "oov = " << to_string(c.oov) << '\n'
      << "hidden_size = " << t.hidden_size << '\n'
      << "head_width = " << t.head_width << '\n'
      << "epochs = " << t.epochs << '\n'
      << "learning_rate = " << t.learning_rate << '\n'
      << "adam_beta1 = " << t.adam_beta1 << '\n'
      << "adam_beta2 = " << t.adam_beta2 << '\n'
      << "adam_epsilon = " << t.adam_epsilon << '\n'
      << "grad_clip = " << t.grad_clip << '\n'
      << "batch_size = " << t.batch_size << '\n'
      << "early_stop_patience = " << t.early_stop_patience << '\n'
      << "validation_fraction = " << t.validation_fraction << '\n'
      << "train_fraction = " << c.train_fraction << '\n'
      << "seed = " << c.seed << '\n'
      << "members = " << c.members << '\n'
      << "bagging = " << c.bagging << '\n'
      << "candidates = " << c.candidates << '\n'
      << "top_fraction = " << c.top_fraction << '\n'
      << "jobs = " << c.jobs << '\n'
      << "baseline_pooling = "
      << (c.baseline_pooling == baseline::Pooling::Pooled ? "pooled" : "equal") << '\n';
  return out.str();
}

}  // namespace corrnet
