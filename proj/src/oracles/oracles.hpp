#pragma once

// Reference computations that deliberately avoid the library's fast paths.
// Used by the test suites and by `corrnet selftest`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "corrnet/corpus.hpp"
#include "corrnet/neural.hpp"

namespace corrnet::oracles {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  std::size_t n_checked = 0;
};

// Compares backward() on L = (r_hat - target)^2 against central differences
// with step eps on every parameter. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, floor). Central differences
// at eps = 1e-5 carry about 1e-11 of absolute rounding error, so gradients below
// the floor are in effect compared absolutely.
GradCheckResult check_gradients(const neural::ModelParams& params, const Sequence& seq_a,
                                const Sequence& seq_b, double target, double eps = 1e-5,
                                double floor = 1e-6);

/// Random sequence of `length` d-vectors with entries in [-1, 1].
Sequence random_sequence(std::size_t length, std::size_t d, std::uint64_t seed);

/// Random parameters with weights and biases in [-scale, scale].
neural::ModelParams random_params(std::size_t d, std::size_t h, std::size_t m, std::uint64_t seed,
                                  double scale = 0.8);

/// Wins plus half ties of `a` over `b` across all n1 * n2 comparisons.
double pairwise_u(std::span<const double> a, std::span<const double> b);

/// Mean r over training findings containing c_i or c_j (global mean if none).
double brute_force_baseline(const Corpus& corpus, std::span<const std::size_t> train_indices,
                            CorrelateId c_i, CorrelateId c_j);

/// Untested fraction by enumerating every unordered pair.
double enumerated_untested_fraction(const Corpus& corpus);

/// Two-pass Pearson correlation written out directly.
double reference_pearson(std::span<const double> x, std::span<const double> y);

/// GRU with d = h = 1 run as a scalar recurrence.
struct ScalarGru {
  double w_update, u_update, b_update;
  double w_reset, u_reset, b_reset;
  double w_cand, u_cand, b_cand;
};
double scalar_gru(const ScalarGru& cell, std::span<const double> inputs);

/// Runs the gradient-check and oracle suites, printing one line per check.
bool run_selftest(std::ostream& out);

}  // namespace corrnet::oracles
