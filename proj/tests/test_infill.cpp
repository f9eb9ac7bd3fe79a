#include <doctest.h>

#include <cmath>
#include <map>

#include "corrnet/errors.hpp"
#include "corrnet/infill.hpp"
#include "corrnet/random.hpp"
#include "test_util.hpp"

using namespace corrnet;
using namespace corrnet::infill;

namespace {

CorrelateId add(Corpus& corpus, const std::string& name) { return corpus.add_correlate(name, {name}); }

double fake_predict(CorrelateId a, CorrelateId b) {
  // Plain arithmetic so compile-time folding matches the runtime call exactly.
  return 0.1 * static_cast<double>(a) - 0.05 * static_cast<double>(b) + 0.01 * a * b;
}

Corpus two_papers() {
  Corpus corpus;
  const auto a = add(corpus, "a");
  const auto b = add(corpus, "b");
  const auto c = add(corpus, "c");
  const auto d = add(corpus, "d");
  corpus.add_finding({a, b, 0.3, "p1", 2010});
  corpus.add_finding({c, d, -0.2, "p2", 2010});
  return corpus;
}

}  // namespace

TEST_CASE("build_table: two disjoint papers") {
  const auto corpus = two_papers();
  const auto table = build_table(corpus, {"p1", "p2"}, fake_predict);
  CHECK(table.size() == 4);
  CHECK(table.off_diagonal_pairs() == 6);
  CHECK(table.count(CellKind::Reported) == 2);
  CHECK(table.count(CellKind::Predicted) == 4);
  CHECK(table.infill_fraction() == 4.0 / 6.0);
  CHECK(table.correlate_order() == std::vector<CorrelateId>{0, 1, 2, 3});
  CHECK(table.cell(0, 1) == Cell{CellKind::Reported, 0.3});
  CHECK(table.cell(3, 2) == Cell{CellKind::Reported, -0.2});
  CHECK(table.cell(1, 2).kind == CellKind::Predicted);
  CHECK(table.cell(1, 2).value == fake_predict(1, 2));
  CHECK(table.cell(2, 2).kind == CellKind::Diagonal);
}

TEST_CASE("build_table: fully reported paper, repeated reports, unknown paper") {
  Corpus corpus;
  const auto a = add(corpus, "a");
  const auto b = add(corpus, "b");
  const auto c = add(corpus, "c");
  corpus.add_finding({a, b, 0.1, "p", 2000});
  corpus.add_finding({a, c, 0.2, "p", 2000});
  corpus.add_finding({b, c, 0.3, "p", 2000});
  corpus.add_finding({b, a, 0.5, "p", 2000});
  corpus.add_finding({a, b, 0.9, "q", 2001});
  const auto table = build_table(corpus, {"p"}, fake_predict);
  CHECK(table.infill_fraction() == 0.0);
  CHECK(table.cell(1, 0).value == doctest::Approx(0.3));  // only paper p's reports

  try {
    build_table(corpus, {"p", "nope"}, fake_predict);
    FAIL("expected an error");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
  CHECK_THROWS_AS(build_table(corpus, {}, fake_predict), ArgumentError);
}

TEST_CASE("CorrelationTable: diagonal is fixed, cells symmetric") {
  CorrelationTable table({5, 6, 7});
  CHECK_THROWS_AS(table.set(1, 1, {CellKind::Predicted, 0.0}), ArgumentError);
  CHECK_THROWS_AS(table.set(0, 1, {CellKind::Diagonal, 0.0}), ArgumentError);
  CHECK_THROWS_AS(table.cell(0, 3), ArgumentError);
  table.set(2, 0, {CellKind::Predicted, 0.25});
  CHECK(table.cell(0, 2) == table.cell(2, 0));
  CHECK(CorrelationTable({1}).infill_fraction() == 0.0);
}

TEST_CASE("build_table: reported cells are never overwritten") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    Corpus corpus;
    const std::size_t n = 3 + rng.below(10);
    for (std::size_t i = 0; i < n; ++i) add(corpus, "c" + std::to_string(i));
    const std::size_t n_papers = 1 + rng.below(4);
    const std::size_t n_findings = 1 + rng.below(25);
    for (std::size_t k = 0; k < n_findings; ++k) {
      const auto a = static_cast<CorrelateId>(rng.below(n));
      auto b = static_cast<CorrelateId>(rng.below(n - 1));
      if (b >= a) ++b;
      corpus.add_finding({a, b, std::round(rng.uniform(-1.0, 1.0) * 1e3) / 1e3,
                          "p" + std::to_string(rng.below(n_papers)), 2000});
    }
    auto papers = corpus.paper_ids();
    rng.shuffle(std::span<std::string>(papers));
    papers.resize(1 + rng.below(papers.size()));

    std::map<PairKey, std::pair<double, int>> expected;
    for (const auto& f : corpus.findings()) {
      if (std::find(papers.begin(), papers.end(), f.paper_id) == papers.end()) continue;
      auto& acc = expected[PairKey::of(f.correlate_a, f.correlate_b)];
      acc.first += f.r;
      acc.second += 1;
    }

    // A predictor far outside [-1, 1] makes any overwrite visible.
    const auto table = build_table(corpus, papers, [](CorrelateId, CorrelateId) { return 7.0; });
    const auto& order = table.correlate_order();
    std::size_t reported = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = 0; j < order.size(); ++j) {
        const Cell& cell = table.cell(i, j);
        CHECK(cell == table.cell(j, i));
        if (i == j) {
          CHECK(cell.kind == CellKind::Diagonal);
          continue;
        }
        auto it = expected.find(PairKey::of(order[i], order[j]));
        if (it != expected.end()) {
          CHECK(cell.kind == CellKind::Reported);
          CHECK(std::abs(cell.value - it->second.first / it->second.second) < 1e-12);
          if (i < j) ++reported;
        } else {
          CHECK(cell == Cell{CellKind::Predicted, 7.0});
        }
      }
    }
    CHECK(reported == expected.size());
    CHECK(table.count(CellKind::Reported) == expected.size());
    CHECK(table.infill_fraction() ==
          doctest::Approx(1.0 - double(expected.size()) / double(table.off_diagonal_pairs())));
  }
}

TEST_CASE("export_table round trip and mask counts") {
  const auto corpus = two_papers();
  const auto table = build_table(corpus, {"p2", "p1"}, fake_predict);
  corrnet::testing::TempDir dir;
  export_table(table, corpus, dir / "t");
  CHECK(std::filesystem::exists(values_path(dir / "t")));
  CHECK(std::filesystem::exists(mask_path(dir / "t")));

  const auto back = read_exported_table(dir / "t");
  REQUIRE(back.labels.size() == 4);
  CHECK(back.labels[0] == "c");
  std::size_t n_reported = 0, n_predicted = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(back.values[i].size() == 4);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(back.mask[i][j] == table.cell(i, j).kind);
      if (i == j) {
        CHECK(std::isnan(back.values[i][j]));
        continue;
      }
      CHECK(std::abs(back.values[i][j] - table.cell(i, j).value) <= 5e-7);
      CHECK(back.values[i][j] == back.values[j][i]);
      if (back.mask[i][j] == CellKind::Reported) ++n_reported;
      if (back.mask[i][j] == CellKind::Predicted) ++n_predicted;
    }
  }
  CHECK(n_reported == 2 * table.count(CellKind::Reported));
  CHECK(n_predicted == 2 * table.count(CellKind::Predicted));
  CHECK(to_char(CellKind::Reported) == 'R');
  CHECK_THROWS_AS(read_exported_table(dir / "missing"), IoError);
}
