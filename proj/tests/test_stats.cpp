#include <doctest.h>

#include <cmath>
#include <vector>

#include "corrnet/errors.hpp"
#include "corrnet/random.hpp"
#include "corrnet/stats.hpp"
#include "oracles.hpp"

using namespace corrnet;
using namespace corrnet::stats;

TEST_CASE("pearson: affine relations") {
  const std::vector<double> x = {0.5, 1.0, 2.5, 3.0, 7.0};
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(2.0 * v + 1.0);
    down.push_back(-v);
  }
  CHECK(pearson(x, up) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, down) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("pearson: hand example") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {1, 3, 2, 4};
  // cov = 4, var_x = var_y = 5 (sums of squared deviations)
  CHECK(std::abs(pearson(x, y) - 0.8) < 1e-12);
}

TEST_CASE("pearson: zero variance and bad lengths") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> flat = {2, 2, 2};
  CHECK_THROWS_AS(pearson(x, flat), UndefinedStatisticError);
  CHECK_THROWS_AS(pearson(flat, x), UndefinedStatisticError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ArgumentError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
}

TEST_CASE("pearson: symmetric, sign of affine maps, matches two-pass reference") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    CHECK(std::abs(pearson(x, y) - pearson(y, x)) < 1e-12);
    CHECK(std::abs(pearson(x, y) - oracles::reference_pearson(x, y)) < 1e-12);

    const double a = rng.uniform(-3.0, 3.0);
    if (std::abs(a) < 1e-3) continue;
    const double b = rng.uniform(-5.0, 5.0);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b;
    CHECK(std::abs(pearson(x, z) - (a > 0 ? 1.0 : -1.0)) < 1e-12);
  }
}

TEST_CASE("mann_whitney_u: separation and ties") {
  const std::vector<double> a = {1, 2};
  const std::vector<double> b = {3, 4};
  CHECK(mann_whitney_u(a, b).u_statistic == 0.0);
  CHECK(mann_whitney_u(b, a).u_statistic == 4.0);

  const std::vector<double> ones = {1, 1, 1};
  const auto tied = mann_whitney_u(ones, ones);
  CHECK(tied.u_statistic == 4.5);
  CHECK(tied.p_value == 1.0);
  CHECK(tied.n1 == 3);
  CHECK(tied.n2 == 3);

  CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, b), ArgumentError);
}

TEST_CASE("mann_whitney_u: exhaustive pairwise oracle up to 5x5 with ties") {
  Rng rng(3);
  for (std::size_t n1 = 1; n1 <= 5; ++n1) {
    for (std::size_t n2 = 1; n2 <= 5; ++n2) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(n1), b(n2);
        for (auto& v : a) v = static_cast<double>(rng.below(4));  // small support forces ties
        for (auto& v : b) v = static_cast<double>(rng.below(4));
        const auto ab = mann_whitney_u(a, b);
        const auto ba = mann_whitney_u(b, a);
        CHECK(ab.u_statistic == oracles::pairwise_u(a, b));
        CHECK(ab.u_statistic + ba.u_statistic == static_cast<double>(n1 * n2));
        CHECK(ab.u_statistic >= 0.0);
        CHECK(ab.u_statistic <= static_cast<double>(n1 * n2));
        CHECK(ab.p_value >= 0.0);
        CHECK(ab.p_value <= 1.0);
        CHECK(ab.p_value == doctest::Approx(ba.p_value));
      }
    }
  }
}

TEST_CASE("mann_whitney_u: p-value against a normal-approximation hand computation") {
  // a = {1,2,3,4,5}, b = {6,7,8,9,10}: U = 0, mu = 12.5, sigma^2 = 25*11/12.
  const std::vector<double> a = {1, 2, 3, 4, 5};
  const std::vector<double> b = {6, 7, 8, 9, 10};
  const auto res = mann_whitney_u(a, b);
  const double z = (12.5 - 0.5) / std::sqrt(25.0 * 11.0 / 12.0);
  CHECK(res.p_value == doctest::Approx(std::erfc(z / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(res.p_value < 0.05);
}

TEST_CASE("quartiles: inclusive linear interpolation") {
  const std::vector<double> x = {5, 1, 4, 2, 3};
  const auto [q1, q3] = quartiles(x);
  CHECK(q1 == 2.0);
  CHECK(q3 == 4.0);

  const std::vector<double> four = {1, 2, 3, 4};  // positions 0.75 and 2.25
  const auto [f1, f3] = quartiles(four);
  CHECK(f1 == doctest::Approx(1.75));
  CHECK(f3 == doctest::Approx(3.25));

  const std::vector<double> flat = {0.3, 0.3, 0.3, 0.3, 0.3};
  const auto [c1, c3] = quartiles(flat);
  CHECK(c1 == 0.3);
  CHECK(c3 == 0.3);

  CHECK_THROWS_AS(quartiles(std::vector<double>{0, 1}), ArgumentError);
}

TEST_CASE("sample_sd uses divisor n - 1") {
  const std::vector<double> x = {0.1, 0.3};
  CHECK(sample_sd(x) == doctest::Approx(std::sqrt(0.02)));
  CHECK_THROWS_AS(sample_sd(std::vector<double>{1.0}), ArgumentError);
}
