#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "blocksense/measure.hpp"
#include "json.hpp"

using namespace blocksense;

namespace {

double frob_from_dense(const SensingMatrix& x) {
  double s = 0;
  for (double v : x.to_dense()) s += v * v;
  return std::sqrt(s);
}

double trace_from_dense(const SignalInstance& inst, const SensingMatrix& x) {
  std::vector<double> d = x.to_dense();
  double s = 0;
  for (int i = 1; i <= inst.n1; ++i)
    for (int j = 1; j <= inst.n2; ++j)
      s += inst.value(i, j) * d[static_cast<size_t>(i - 1) * inst.n2 + (j - 1)];
  return s;
}

}  // namespace

TEST_CASE("structured matrices carry unit energy") {
  Shape s{6, 8};
  SensingMatrix ones = allones_sensing(6, 8);
  CHECK(ones.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ones.entry(3, 5) == doctest::Approx(1.0 / std::sqrt(48.0)));

  SensingMatrix col = column_sensing({2, 3, 5}, 4, s);
  CHECK(col.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(col.entry(3, 4) == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(col.entry(4, 4) == 0.0);
  CHECK(col.entry(3, 5) == 0.0);

  SensingMatrix row = row_sensing({1, 8}, 6, s);
  CHECK(row.frobenius_norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(row.entry(6, 8) == doctest::Approx(1.0 / std::sqrt(2.0)));

  for (const SensingMatrix& x : {ones, col, row})
    CHECK(x.frobenius_norm() == doctest::Approx(frob_from_dense(x)).epsilon(1e-13));
}

TEST_CASE("block-support matrices: entries, norm, signed halves") {
  Shape s{8, 8};
  double a = 0.25;
  std::vector<std::pair<Block, double>> halves = {
      {Block{1, 1, 4, 4}, +a},
      {Block{5, 5, 4, 4, false}, -a},
      {Block{7, 1, 2, 4}, +a},  // disjoint from both
  };
  SensingMatrix x = block_support_sensing(halves, s);
  CHECK(x.entry(2, 2) == a);
  CHECK(x.entry(6, 6) == -a);
  CHECK(x.entry(8, 3) == a);
  CHECK(x.entry(1, 8) == 0.0);
  CHECK(x.frobenius_norm() == doctest::Approx(frob_from_dense(x)).epsilon(1e-13));

  // Wrapped support tiles work on the torus.
  SensingMatrix wrapped = block_support_sensing({{Block{7, 7, 4, 4, true}, 1.0}}, s);
  CHECK(wrapped.entry(8, 8) == 1.0);
  CHECK(wrapped.entry(2, 2) == 1.0);
  CHECK(wrapped.entry(3, 3) == 0.0);
  CHECK(wrapped.frobenius_norm() == doctest::Approx(4.0));  // 16 unit cells

  CHECK_THROWS_AS(column_sensing({3, 2}, 1, s), std::invalid_argument);  // unsorted
  CHECK_THROWS_AS(column_sensing({2, 2}, 1, s), std::invalid_argument);  // dup
  CHECK_THROWS_AS(column_sensing({2, 9}, 1, s), std::invalid_argument);  // range
}

TEST_CASE("gaussian ensemble has unit energy in expectation, untruncated") {
  Rng rng(RngHandle{11, 0});
  const int draws = 400;
  double acc = 0, lo = 1e9, hi = -1e9;
  for (int d = 0; d < draws; ++d) {
    SensingMatrix x = gaussian_sensing(12, 12, rng);
    double e = x.frobenius_norm() * x.frobenius_norm();
    acc += e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.05));
  CHECK(lo < 1.0);   // energies scatter around 1 ...
  CHECK(hi > 1.0);   // ... in both directions: no renormalizing, no clipping
}

TEST_CASE("trace inner products match the dense oracle") {
  Rng rng(RngHandle{5, 3});
  SignalInstance inst = make_instance(7, 9, 3, 2, 1.75, 1.0, Block{4, 6, 3, 2});
  Shape s = inst.shape();

  std::vector<SensingMatrix> xs;
  xs.push_back(allones_sensing(7, 9));
  xs.push_back(gaussian_sensing(7, 9, rng));
  xs.push_back(column_sensing({1, 4, 5, 6}, 6, s));
  xs.push_back(column_sensing({1, 2}, 1, s));
  xs.push_back(row_sensing({5, 6, 7, 8, 9}, 4, s));
  xs.push_back(block_support_sensing(
      {{Block{3, 5, 3, 3}, 0.5}, {Block{6, 8, 2, 3, true}, -0.5}}, s));
  for (const SensingMatrix& x : xs)
    CHECK(trace_inner(inst, x) == doctest::Approx(trace_from_dense(inst, x)).epsilon(1e-12));

  SignalInstance null_inst = make_instance(7, 9, 3, 2, 0.0, 1.0, Block{1, 1, 3, 2});
  for (const SensingMatrix& x : xs) CHECK(trace_inner(null_inst, x) == 0.0);
}

TEST_CASE("measurements have the right mean and noise scale") {
  SignalInstance inst = make_instance(10, 10, 4, 4, 2.0, 1.5, Block{3, 3, 4, 4});
  SensingMatrix x = allones_sensing(10, 10);
  const double want_mean = trace_inner(inst, x);
  CHECK(want_mean == doctest::Approx(2.0 * 16 / 10.0));

  Rng rng(RngHandle{21, 0});
  BudgetLedger ledger(20000);
  const int n = 10000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double y = measure(inst, x, rng, ledger, Phase::Detection).y;
    sum += y;
    sumsq += y * y;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - want_mean) < 4 * 1.5 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.5 * 1.5).epsilon(0.1));

  // Noiseless measurements reproduce the trace exactly.
  SignalInstance clean = make_instance(10, 10, 4, 4, 2.0, 0.0, Block{3, 3, 4, 4});
  CHECK(measure(clean, x, rng, ledger, Phase::Detection).y == want_mean);
}

TEST_CASE("ledger refuses overspend before taking the measurement") {
  BudgetLedger ledger(5);
  ledger.charge(Phase::Passive, 3);
  CHECK(ledger.total_spent() == 3);
  CHECK(ledger.remaining() == 2);
  CHECK_THROWS_AS(ledger.charge(Phase::Passive, 3), budget_error);
  CHECK(ledger.total_spent() == 3);  // failed charge spent nothing
  ledger.charge(Phase::Cbs, 2);
  CHECK(ledger.remaining() == 0);
  CHECK_THROWS_AS(ledger.charge(Phase::Cbs), budget_error);

  BudgetLedger capped(100);
  capped.set_cap(Phase::ExactColScan, 4);
  capped.charge(Phase::ExactColScan, 4);
  CHECK_THROWS_AS(capped.charge(Phase::ExactColScan), budget_error);
  CHECK(capped.spent(Phase::ExactColScan) == 4);
  capped.charge(Phase::ExactRowScan, 50);  // other phases unaffected
  CHECK(capped.total_spent() == 54);

  SignalInstance inst = make_instance(4, 4, 2, 2, 1.0, 1.0, Block{1, 1, 2, 2});
  SensingMatrix x = allones_sensing(4, 4);
  Rng rng(RngHandle{1, 0});
  BudgetLedger tiny(1);
  (void)measure(inst, x, rng, tiny, Phase::Detection);
  CHECK_THROWS_AS(measure(inst, x, rng, tiny, Phase::Detection), budget_error);
  CHECK(tiny.total_spent() == 1);
  CHECK(tiny.max_energy_deviation() <= 1e-12);
}

TEST_CASE("transcripts serialize one measurement per line") {
  SignalInstance inst = make_instance(6, 6, 2, 2, 1.0, 0.0, Block{2, 2, 2, 2});
  Rng rng(RngHandle{3, 0});
  BudgetLedger ledger(10);
  Transcript t;
  (void)measure(inst, allones_sensing(6, 6), rng, ledger, Phase::Detection, 0, &t);
  (void)measure(inst, column_sensing({2, 3}, 2, inst.shape()), rng, ledger, Phase::ExactColScan,
                0, &t);
  (void)measure(inst, block_support_sensing({{Block{1, 1, 2, 2}, 0.5}}, inst.shape()), rng,
                ledger, Phase::Cbs, 3, &t);
  REQUIRE(t.size() == 3);

  std::istringstream lines(transcript_to_jsonl(t));
  std::string line;
  std::vector<nlohmann::json> parsed;
  while (std::getline(lines, line)) parsed.push_back(nlohmann::json::parse(line));
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0]["phase"] == "detection");
  CHECK(parsed[0]["x"]["kind"] == "uniform");
  CHECK(parsed[1]["phase"] == "exact-col");
  CHECK(parsed[1]["x"]["kind"] == "column");
  CHECK(parsed[2]["phase"] == "cbs-level-3");
  CHECK(parsed[2]["x"]["kind"] == "block-support");
  CHECK(parsed[0]["y"].get<double>() == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("phase tags") {
  CHECK(phase_tag(Phase::Detection) == "detection");
  CHECK(phase_tag(Phase::Passive) == "passive");
  CHECK(phase_tag(Phase::Cbs, 1) == "cbs-level-1");
  CHECK(phase_tag(Phase::ExactColScan) == "exact-col");
  CHECK(phase_tag(Phase::ExactColSearch) == "exact-col");
  CHECK(phase_tag(Phase::ExactRowScan) == "exact-row");
  CHECK(phase_tag(Phase::ExactRowSearch) == "exact-row");
}
