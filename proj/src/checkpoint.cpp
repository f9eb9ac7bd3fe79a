#include "corrnet/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "corrnet/errors.hpp"

namespace corrnet {

namespace {

constexpr const char* kMagic = "corrnet-checkpoint";
constexpr int kVersion = 1;

std::string hex(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_hex(const std::string& s, const std::string& source, std::size_t line) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && body[0] == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, std::chars_format::hex);
  if (ec != std::errc() || ptr != body.data() + body.size()) {
    throw FormatError(source, line, "bad checkpoint value '" + s + "'");
  }
  return negative ? -v : v;
}

}  // namespace

void write_checkpoint(const neural::ModelParams& params, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims " << params.input_size << ' ' << params.hidden_size << ' ' << params.head_width << '\n';
  out << "seed " << params.seed << '\n';
  const auto& names = neural::ModelParams::tensor_names();
  const auto tensors = params.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    const neural::Matrix& m = *tensors[k];
    out << "tensor " << names[k] << ' ' << m.rows << ' ' << m.cols << '\n';
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (c) out << ' ';
        out << hex(m(r, c));
      }
      out << '\n';
    }
  }
}

neural::ModelParams read_checkpoint(std::istream& in, const std::string& source) {
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw FormatError(source, line_no, "unexpected end of checkpoint");
    ++line_no;
    return std::istringstream(line);
  };

  {
    auto ls = next_line();
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kMagic) throw FormatError(source, line_no, "not a corrnet checkpoint");
    if (version != kVersion) {
      throw FormatError(source, line_no, "unsupported checkpoint version " + std::to_string(version));
    }
  }
  std::size_t d = 0, h = 0, m = 0;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> d >> h >> m;
    if (key != "dims" || !ls || d == 0 || h == 0 || m == 0) throw FormatError(source, line_no, "bad dims line");
  }
  std::uint64_t seed = 0;
  {
    auto ls = next_line();
    std::string key;
    ls >> key >> seed;
    if (key != "seed" || !ls) throw FormatError(source, line_no, "bad seed line");
  }

  neural::ModelParams params = neural::init_params(d, h, m, seed).zeros_like();
  const auto& names = neural::ModelParams::tensor_names();
  auto tensors = params.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    neural::Matrix& mat = *tensors[k];
    {
      auto ls = next_line();
      std::string key, name;
      std::size_t rows = 0, cols = 0;
      ls >> key >> name >> rows >> cols;
      if (key != "tensor" || name != names[k]) {
        throw FormatError(source, line_no, "expected tensor " + std::string(names[k]));
      }
      if (rows != mat.rows || cols != mat.cols) {
        throw FormatError(source, line_no, "tensor " + name + " has the wrong shape");
      }
    }
    for (std::size_t r = 0; r < mat.rows; ++r) {
      auto ls = next_line();
      std::string token;
      for (std::size_t c = 0; c < mat.cols; ++c) {
        if (!(ls >> token)) throw FormatError(source, line_no, "short tensor row");
        mat(r, c) = parse_hex(token, source, line_no);
      }
      if (ls >> token) throw FormatError(source, line_no, "long tensor row");
    }
  }
  return params;
}

void save_checkpoint(const neural::ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  write_checkpoint(params, out);
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

neural::ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace corrnet
