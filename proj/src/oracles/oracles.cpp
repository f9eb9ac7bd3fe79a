#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "corrnet/baseline.hpp"
#include "corrnet/ensemble.hpp"
#include "corrnet/random.hpp"
#include "corrnet/stats.hpp"

namespace corrnet::oracles {

namespace {

double pair_loss(const neural::ModelParams& p, const Sequence& a, const Sequence& b, double target) {
  const double e = neural::predict_pair(a, b, p) - target;
  return e * e;
}

}  // namespace

GradCheckResult check_gradients(const neural::ModelParams& params, const Sequence& seq_a,
                                const Sequence& seq_b, double target, double eps, double floor) {
  const auto trace = neural::predict_pair_trace(seq_a, seq_b, params);
  const auto analytic = neural::backward(trace, 2.0 * (trace.r_hat - target), params);

  GradCheckResult result;
  neural::ModelParams probe = params;
  auto probe_tensors = probe.tensors();
  const auto grad_tensors = analytic.tensors();
  const auto& names = neural::ModelParams::tensor_names();
  for (std::size_t k = 0; k < probe_tensors.size(); ++k) {
    auto& values = probe_tensors[k]->data;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = pair_loss(probe, seq_a, seq_b, target);
      values[i] = saved - eps;
      const double minus = pair_loss(probe, seq_a, seq_b, target);
      values[i] = saved;

      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = grad_tensors[k]->data[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      const double rel = std::abs(a - numeric) / denom;
      ++result.n_checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_tensor = std::string(names[k]);
        result.worst_index = i;
      }
    }
  }
  return result;
}

Sequence random_sequence(std::size_t length, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Sequence seq(length, Vector(d));
  for (auto& v : seq) {
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
  }
  return seq;
}

neural::ModelParams random_params(std::size_t d, std::size_t h, std::size_t m, std::uint64_t seed,
                                  double scale) {
  neural::ModelParams p = neural::init_params(d, h, m, seed);
  Rng rng(derive_seed(seed, 77));
  for (neural::Matrix* t : p.tensors()) {
    for (double& v : t->data) v = rng.uniform(-scale, scale);
  }
  return p;
}

double pairwise_u(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  }
  return u;
}

double brute_force_baseline(const Corpus& corpus, std::span<const std::size_t> train_indices,
                            CorrelateId c_i, CorrelateId c_j) {
  double sum = 0.0, all = 0.0;
  std::size_t count = 0;
  for (std::size_t idx : train_indices) {
    const Finding& f = corpus.findings()[idx];
    all += f.r;
    const bool hit = f.correlate_a == c_i || f.correlate_b == c_i || f.correlate_a == c_j ||
                     f.correlate_b == c_j;
    if (hit) {
      sum += f.r;
      ++count;
    }
  }
  if (count == 0) return all / static_cast<double>(train_indices.size());
  return sum / static_cast<double>(count);
}

double enumerated_untested_fraction(const Corpus& corpus) {
  std::set<std::pair<CorrelateId, CorrelateId>> tested;
  for (const auto& f : corpus.findings()) {
    tested.insert({std::min(f.correlate_a, f.correlate_b), std::max(f.correlate_a, f.correlate_b)});
  }
  const auto n = static_cast<CorrelateId>(corpus.correlates().size());
  std::size_t total = 0, untested = 0;
  for (CorrelateId a = 0; a < n; ++a) {
    for (CorrelateId b = a + 1; b < n; ++b) {
      ++total;
      if (!tested.contains({a, b})) ++untested;
    }
  }
  return static_cast<double>(untested) / static_cast<double>(total);
}

double reference_pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return cov / std::sqrt(vx) / std::sqrt(vy);
}

double scalar_gru(const ScalarGru& c, std::span<const double> inputs) {
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  double h = 0.0;
  for (double x : inputs) {
    const double z = sig(c.w_update * x + c.u_update * h + c.b_update);
    const double r = sig(c.w_reset * x + c.u_reset * h + c.b_reset);
    const double n = std::tanh(c.w_cand * x + c.u_cand * (r * h) + c.b_cand);
    h = (1.0 - z) * n + z * h;
  }
  return h;
}

bool run_selftest(std::ostream& out) {
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS" : "FAIL") << "  " << name << "  " << detail << '\n';
    all_ok = all_ok && ok;
  };

  {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng rng(derive_seed(s, 1));
      const auto p = random_params(4, 3, 2, s);
      const auto a = random_sequence(1 + rng.below(5), 4, derive_seed(s, 2));
      const auto b = random_sequence(1 + rng.below(5), 4, derive_seed(s, 3));
      worst = std::max(worst, check_gradients(p, a, b, rng.uniform(-1.0, 1.0)).max_rel_error);
    }
    report("gradient check (20 fixtures, d=4 h=3 m=2)", worst < 1e-4,
           "max rel error " + std::to_string(worst));
  }
  {
    bool ok = true;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto p = random_params(4, 3, 2, s + 1000);
      const auto a = random_sequence(3, 4, derive_seed(s, 4));
      const auto b = random_sequence(4, 4, derive_seed(s, 5));
      ok = ok && neural::predict_pair(a, b, p) == neural::predict_pair(b, a, p);
    }
    report("pair symmetry (200 draws)", ok, "bit-identical");
  }
  {
    bool ok = true;
    std::vector<double> a, b;
    for (std::size_t n1 = 1; n1 <= 5; ++n1) {
      for (std::size_t n2 = 1; n2 <= 5; ++n2) {
        Rng rng(n1 * 10 + n2);
        a.resize(n1);
        b.resize(n2);
        for (double& v : a) v = static_cast<double>(rng.below(4));
        for (double& v : b) v = static_cast<double>(rng.below(4));
        ok = ok && stats::mann_whitney_u(a, b).u_statistic == pairwise_u(a, b);
      }
    }
    report("Mann-Whitney U vs pairwise count (up to 5x5)", ok, "exact");
  }
  {
    Corpus c;
    const auto a = c.add_correlate("a", {"a"});
    const auto b = c.add_correlate("b", {"b"});
    const auto cc = c.add_correlate("c", {"c"});
    const auto d = c.add_correlate("d", {"d"});
    c.add_finding({a, b, 0.2, "p", 2010});
    c.add_finding({a, cc, 0.4, "p", 2010});
    c.add_finding({b, d, 0.6, "p", 2010});
    const std::vector<std::size_t> train = {0, 1, 2};
    const auto model = baseline::fit_baseline(c, train);
    bool ok = true;
    for (CorrelateId i = 0; i < 4; ++i) {
      for (CorrelateId j = 0; j < 4; ++j) {
        if (i == j) continue;
        ok = ok && std::abs(baseline::baseline_predict(model, i, j) -
                            brute_force_baseline(c, train, i, j)) < 1e-12;
      }
    }
    report("baseline vs brute-force average", ok, "tolerance 1e-12");
  }
  {
    const double ci = ensemble::ci_half_width(0.1659, 50);
    report("ensemble CI half-width (N=50, sd=0.1659)", std::abs(ci - 0.046) <= 0.001,
           "ci " + std::to_string(ci));
  }
  {
    const double x[] = {1, 2, 3, 4};
    const double y[] = {1, 3, 2, 4};
    const double r = stats::pearson(x, y);
    report("pearson hand example", std::abs(r - 0.8) < 1e-12, "r " + std::to_string(r));
  }
  return all_ok;
}

}  // namespace corrnet::oracles
