#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "corrnet/baseline.hpp"
#include "corrnet/checkpoint.hpp"
#include "corrnet/config.hpp"
#include "corrnet/corpus.hpp"
#include "corrnet/embeddings.hpp"
#include "corrnet/ensemble.hpp"
#include "corrnet/errors.hpp"
#include "corrnet/infill.hpp"
#include "corrnet/stats.hpp"
#include "corrnet/synthetic.hpp"
#include "corrnet/training.hpp"
#include "oracles.hpp"

namespace corrnet::cli {
namespace {

struct Paths {
  std::string corpus;
  std::string out;
  std::string checkpoint;
  std::string log;
  std::string predictions;
  std::string scatter;
  std::string truth;
  std::string sidecar;
  std::string papers;
};

struct GenArgs {
  std::size_t correlates = 200;
  std::size_t findings = 2000;
  double noise = 0.05;
  double gain = 2.0;
};

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  if (const char* env = std::getenv("CORRNET_CONFIG"); env && *env) return std::string(env);
  return std::nullopt;
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

Corpus load_corpus_for(const GlobalConfig& cfg, const Paths& paths) {
  if (paths.corpus.empty()) throw ArgumentError("--corpus is required");
  return load_corpus(paths.corpus, cfg.normalization);
}

EmbeddingTable load_table_for(const GlobalConfig& cfg, const Corpus& corpus) {
  if (cfg.embeddings.empty()) throw ArgumentError("--embeddings is required");
  std::unordered_set<std::string> vocab;
  for (const auto& c : corpus.correlates()) vocab.insert(c.tokens.begin(), c.tokens.end());
  return load_embeddings(cfg.embeddings, vocab);
}

void add_train_options(CLI::App* cmd, GlobalConfig& cfg) {
  auto& t = cfg.train;
  cmd->add_option("--epochs", t.epochs, "Maximum training epochs");
  cmd->add_option("--lr,--learning-rate", t.learning_rate, "Adam learning rate");
  cmd->add_option("--beta1", t.adam_beta1, "Adam first-moment decay");
  cmd->add_option("--beta2", t.adam_beta2, "Adam second-moment decay");
  cmd->add_option("--adam-epsilon", t.adam_epsilon, "Adam epsilon");
  cmd->add_option("--grad-clip", t.grad_clip, "Global gradient-norm ceiling");
  cmd->add_option("--batch-size", t.batch_size, "Findings per optimizer step");
  cmd->add_option("--patience", t.early_stop_patience, "Early-stopping patience (epochs)");
  cmd->add_option("--validation-fraction", t.validation_fraction, "Share of train held out for early stopping");
  cmd->add_option("--hidden", t.hidden_size, "Recurrent hidden size");
  cmd->add_option("--head-width", t.head_width, "Regression head width");
}

void add_data_options(CLI::App* cmd, GlobalConfig& cfg, Paths& paths, bool need_embeddings) {
  cmd->add_option("--corpus", paths.corpus, "Findings file")->required();
  auto* emb = cmd->add_option("--embeddings", cfg.embeddings, "Word-vector text file");
  if (need_embeddings && cfg.embeddings.empty()) emb->required();
  cmd->add_option("--seed", cfg.seed, "Seed for split, initialization and sampling");
  cmd->add_option("--train-fraction", cfg.train_fraction, "Share of findings used for training");
  cmd->add_option("--oov", cfg.oov, "Out-of-vocabulary policy: mean, zero or drop")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, OovPolicy>{
              {"mean", OovPolicy::Mean}, {"zero", OovPolicy::Zero}, {"drop", OovPolicy::Drop}},
          CLI::ignore_case));
}

void write_train_log(const training::TrainReport& report, const std::string& path) {
  std::ofstream log(path);
  if (!log) throw IoError("cannot write training log " + path);
  log << "epoch\ttrain_loss\tval_loss\n";
  log << std::setprecision(17);
  for (const auto& e : report.epochs) log << e.epoch << '\t' << e.train_loss << '\t' << e.val_loss << '\n';
  if (!log) throw IoError("failed writing training log " + path);
}

int run_corpus_stats(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus(paths.corpus, cfg.normalization);
  const auto s = corpus_stats(corpus);
  out << "n_correlates\t" << s.n_correlates << '\n'
      << "n_findings\t" << s.n_findings << '\n'
      << "n_papers\t" << s.n_papers << '\n'
      << "n_tested_pairs\t" << s.n_tested_pairs << '\n'
      << "untested_fraction\t" << fmt(s.untested_fraction, 8) << '\n';
  if (!paths.sidecar.empty()) {
    const auto papers = load_paper_sidecar(paths.sidecar);
    std::size_t described = 0;
    for (const auto& id : corpus.paper_ids()) described += papers.contains(id) ? 1 : 0;
    out << "n_papers_described\t" << described << '\n';
  }
  return 0;
}

int run_corpus_gen(const GlobalConfig& cfg, const Paths& paths, const GenArgs& gen, std::ostream& out) {
  if (cfg.embeddings.empty()) throw ArgumentError("--embeddings is required for generation");
  const EmbeddingTable vocab = load_embeddings(cfg.embeddings);
  SyntheticOptions opts;
  opts.n_correlates = gen.correlates;
  opts.n_findings = gen.findings;
  opts.noise_sd = gen.noise;
  opts.gain = gen.gain;
  opts.seed = cfg.seed;
  const auto syn = generate_synthetic(vocab, opts);
  write_corpus(syn.corpus, paths.out);
  if (!paths.truth.empty()) {
    std::ofstream truth(paths.truth);
    if (!truth) throw IoError("cannot write " + paths.truth);
    truth << "finding\tclean_r\n" << std::setprecision(17);
    for (std::size_t i = 0; i < syn.clean_r.size(); ++i) truth << i << '\t' << syn.clean_r[i] << '\n';
  }
  out << "wrote " << syn.corpus.findings().size() << " findings over " << syn.corpus.correlates().size()
      << " correlates to " << paths.out << '\n';
  return 0;
}

int run_train(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const EmbeddingTable table = load_table_for(cfg, corpus);
  const Split split = split_corpus(corpus, cfg.train_fraction, cfg.seed);
  const auto result = training::train(corpus, split, table, cfg.train_config());
  save_checkpoint(result.params, paths.out);
  write_train_log(result.report, paths.log.empty() ? paths.out + ".log.tsv" : paths.log);
  out << "epochs_run\t" << result.report.epochs.size() << '\n'
      << "best_epoch\t" << result.report.best_epoch << '\n';
  if (result.report.test_pearson) out << "test_pearson_r\t" << fmt(*result.report.test_pearson) << '\n';
  return 0;
}

int run_eval(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const EmbeddingTable table = load_table_for(cfg, corpus);
  const auto params = load_checkpoint(paths.checkpoint);
  if (params.input_size != table.dim()) {
    throw ArgumentError("checkpoint expects " + std::to_string(params.input_size) +
                        "-dimensional embeddings but the vector file has " + std::to_string(table.dim()));
  }
  const Split split = split_corpus(corpus, cfg.train_fraction, cfg.seed);
  const auto ev = training::evaluate(params, corpus, split.test_indices, table, cfg.oov);
  out << "n_test\t" << split.test_indices.size() << '\n'
      << "test_pearson_r\t" << fmt(ev.pearson_r) << '\n';
  if (!paths.predictions.empty()) {
    std::ofstream pred(paths.predictions);
    if (!pred) throw IoError("cannot write " + paths.predictions);
    pred << "r\tr_hat\n" << std::setprecision(17);
    for (const auto& [r, r_hat] : ev.predictions) pred << r << '\t' << r_hat << '\n';
  }
  return 0;
}

int run_baseline(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const Split split = split_corpus(corpus, cfg.train_fraction, cfg.seed);
  const auto model = baseline::fit_baseline(corpus, split.train_indices, cfg.baseline_pooling);
  std::vector<double> reported, predicted;
  for (std::size_t idx : split.test_indices) {
    const Finding& f = corpus.findings()[idx];
    reported.push_back(f.r);
    predicted.push_back(baseline::baseline_predict(model, f.correlate_a, f.correlate_b));
  }
  out << "n_test\t" << split.test_indices.size() << '\n'
      << "test_pearson_r\t" << fmt(stats::pearson(reported, predicted)) << '\n';
  return 0;
}

ensemble::EnsembleOptions ensemble_options(const GlobalConfig& cfg) {
  return {cfg.members, cfg.bagging, cfg.jobs};
}

int run_ensemble_train(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const EmbeddingTable table = load_table_for(cfg, corpus);
  const Split split = split_corpus(corpus, cfg.train_fraction, cfg.seed);
  const auto ens = ensemble::train_ensemble(corpus, split, table, cfg.train_config(), ensemble_options(cfg));
  ensemble::save_ensemble(ens, paths.out);
  out << "members\t" << ens.size() << '\n' << "saved\t" << paths.out << '\n';
  return 0;
}

int run_qbc(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const EmbeddingTable table = load_table_for(cfg, corpus);
  ensemble::Ensemble ens;
  if (!paths.checkpoint.empty()) {
    ens = ensemble::load_ensemble(paths.checkpoint);
  } else {
    const Split split = split_corpus(corpus, cfg.train_fraction, cfg.seed);
    ens = ensemble::train_ensemble(corpus, split, table, cfg.train_config(), ensemble_options(cfg));
  }
  const auto embedded = training::embed_correlates(corpus, table, cfg.oov);
  const auto result =
      ensemble::qbc_search(ens, corpus, embedded, cfg.candidates, cfg.seed, cfg.top_fraction, cfg.jobs);
  const std::string scatter = paths.scatter.empty() ? paths.out + ".scatter.tsv" : paths.scatter;
  ensemble::write_qbc_report(result, corpus, paths.out, scatter);
  out << "candidates\t" << result.ranked.size() << '\n' << "flagged\t" << result.n_flagged << '\n';
  if (result.ranked.size() >= 8) {
    try {
      const auto trend = ensemble::disagreement_trend(result.ranked);
      out << "trend_pearson_r\t" << fmt(trend.pearson_r) << '\n'
          << "mwu_u\t" << fmt(trend.mwu.u_statistic, 1) << '\n'
          << "mwu_p\t" << std::scientific << std::setprecision(3) << trend.mwu.p_value << std::defaultfloat
          << '\n';
    } catch (const UndefinedStatisticError& e) {
      out << "trend\tundefined (" << e.what() << ")\n";
    }
  }
  return 0;
}

std::vector<std::string> split_commas(const std::string& list) {
  std::vector<std::string> items;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int run_infill(const GlobalConfig& cfg, const Paths& paths, std::ostream& out) {
  const Corpus corpus = load_corpus_for(cfg, paths);
  const EmbeddingTable table = load_table_for(cfg, corpus);
  const auto papers = split_commas(paths.papers);
  infill::CorrelationTable result;
  if (std::filesystem::is_directory(paths.checkpoint)) {
    result = infill::build_table(corpus, papers, ensemble::load_ensemble(paths.checkpoint), table, cfg.oov);
  } else {
    result = infill::build_table(corpus, papers, load_checkpoint(paths.checkpoint), table, cfg.oov);
  }
  infill::export_table(result, corpus, paths.out);
  out << "correlates\t" << result.size() << '\n'
      << "reported_pairs\t" << result.count(infill::CellKind::Reported) << '\n'
      << "predicted_pairs\t" << result.count(infill::CellKind::Predicted) << '\n'
      << "infill_fraction\t" << fmt(result.infill_fraction()) << '\n';
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  GlobalConfig cfg;
  try {
    if (auto path = find_config_path(args)) apply_config_file(cfg, *path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  Paths paths;
  GenArgs gen;
  std::string config_path;

  CLI::App app{"Predict correlations between study variables from their descriptions", "corrnet"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.add_option("--config", config_path, "Flat key = value config file (or CORRNET_CONFIG)");
  app.add_option("--jobs", cfg.jobs, "Worker threads (0 = available cores)");

  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus utilities");
  corpus_cmd->require_subcommand(1);
  auto* stats_cmd = corpus_cmd->add_subcommand("stats", "Print correlate and pair coverage counts");
  stats_cmd->add_option("file", paths.corpus, "Findings file")->required();
  stats_cmd->add_option("--papers", paths.sidecar, "Optional per-paper sidecar file");
  auto* gen_cmd = corpus_cmd->add_subcommand("gen", "Generate a synthetic corpus with known truth");
  gen_cmd->add_option("--correlates", gen.correlates, "Number of correlates");
  gen_cmd->add_option("--findings", gen.findings, "Number of findings (distinct pairs)");
  gen_cmd->add_option("--seed", cfg.seed, "Generator seed");
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise sd added to r");
  gen_cmd->add_option("--gain", gen.gain, "Gain inside tanh(gain * cosine)");
  gen_cmd->add_option("--embeddings", cfg.embeddings, "Vocabulary vector file");
  gen_cmd->add_option("--out", paths.out, "Output findings file")->required();
  gen_cmd->add_option("--truth", paths.truth, "Optional noise-free r output");

  auto* train_cmd = app.add_subcommand("train", "Train one model and save a checkpoint");
  add_data_options(train_cmd, cfg, paths, true);
  add_train_options(train_cmd, cfg);
  train_cmd->add_option("--out", paths.out, "Checkpoint path")->required();
  train_cmd->add_option("--log", paths.log, "Epoch log (default <out>.log.tsv)");

  auto* eval_cmd = app.add_subcommand("eval", "Held-out Pearson R of a checkpoint");
  add_data_options(eval_cmd, cfg, paths, true);
  eval_cmd->add_option("--checkpoint", paths.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--predictions", paths.predictions, "Optional (r, r_hat) output");

  auto* base_cmd = app.add_subcommand("baseline", "Held-out Pearson R of the mean-value baseline");
  base_cmd->add_option("--corpus", paths.corpus, "Findings file")->required();
  base_cmd->add_option("--seed", cfg.seed, "Split seed");
  base_cmd->add_option("--train-fraction", cfg.train_fraction, "Share of findings used for training");
  base_cmd->add_option("--pooling", cfg.baseline_pooling, "pooled or equal")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, baseline::Pooling>{{"pooled", baseline::Pooling::Pooled},
                                                   {"equal", baseline::Pooling::EqualWeight}}));

  auto* ens_cmd = app.add_subcommand("ensemble-train", "Train a committee and save it to a directory");
  add_data_options(ens_cmd, cfg, paths, true);
  add_train_options(ens_cmd, cfg);
  ens_cmd->add_option("--members", cfg.members, "Committee size N");
  ens_cmd->add_flag("--bagging,!--no-bagging", cfg.bagging, "Bootstrap-resample each member's training set");
  ens_cmd->add_option("--out", paths.out, "Output directory")->required();

  auto* qbc_cmd = app.add_subcommand("qbc", "Rank untested pairs by committee disagreement");
  add_data_options(qbc_cmd, cfg, paths, true);
  add_train_options(qbc_cmd, cfg);
  qbc_cmd->add_option("--members", cfg.members, "Committee size N");
  qbc_cmd->add_flag("--bagging,!--no-bagging", cfg.bagging, "Bootstrap-resample each member's training set");
  qbc_cmd->add_option("--candidates", cfg.candidates, "Random untested pairs to score");
  qbc_cmd->add_option("--top", cfg.top_fraction, "Fraction flagged as most uncertain");
  qbc_cmd->add_option("--checkpoint", paths.checkpoint, "Use a saved ensemble directory instead of training");
  qbc_cmd->add_option("--out", paths.out, "Report path")->required();
  qbc_cmd->add_option("--scatter", paths.scatter, "Scatter output (default <out>.scatter.tsv)");

  auto* infill_cmd = app.add_subcommand("infill", "Infill a multi-paper correlation table");
  add_data_options(infill_cmd, cfg, paths, true);
  infill_cmd->add_option("--checkpoint", paths.checkpoint, "Checkpoint file or ensemble directory")->required();
  infill_cmd->add_option("--papers", paths.papers, "Comma-separated paper ids, in table order")->required();
  infill_cmd->add_option("--out", paths.out, "Output prefix")->required();

  auto* self_cmd = app.add_subcommand("selftest", "Run gradient checks and oracle comparisons");

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (*stats_cmd) return run_corpus_stats(cfg, paths, out);
    if (*gen_cmd) return run_corpus_gen(cfg, paths, gen, out);
    if (*train_cmd) return run_train(cfg, paths, out);
    if (*eval_cmd) return run_eval(cfg, paths, out);
    if (*base_cmd) return run_baseline(cfg, paths, out);
    if (*ens_cmd) return run_ensemble_train(cfg, paths, out);
    if (*qbc_cmd) return run_qbc(cfg, paths, out);
    if (*infill_cmd) return run_infill(cfg, paths, out);
    if (*self_cmd) return oracles::run_selftest(out) ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace corrnet::cli
