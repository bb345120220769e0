#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <vector>

#include "blocksense/loc_passive.hpp"

using namespace blocksense;

namespace {

double block_sum_naive(const std::vector<double>& dense, Shape s, int r, int c, int k1,
                       int k2) {
  double acc = 0;
  for (int i = r; i < r + k1; ++i)
    for (int j = c; j < c + k2; ++j)
      acc += dense[static_cast<size_t>(i - 1) * s.n2 + (j - 1)];
  return acc;
}

struct NaiveLs {
  PositionGrid resid;
  PositionGrid mu;
  Block best;
};

// Reference least squares: per block, recompute everything from dense copies.
NaiveLs naive_least_squares(Shape s, int k1, int k2,
                            const std::vector<SensingMatrix>& xs,
                            const std::vector<double>& ys) {
  BlockFamily fam({s.n1, s.n2}, k1, k2);
  NaiveLs out;
  out.resid = PositionGrid(fam.position_rows(), fam.position_cols());
  out.mu = PositionGrid(fam.position_rows(), fam.position_cols());
  double ysq = 0;
  for (double y : ys) ysq += y * y;
  double best_f = 0;
  bool have = false;
  for (long long bi = 0; bi < fam.size(); ++bi) {
    Block b = fam.at(bi);
    double s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double z =
          block_sum_naive(xs[i].to_dense(), s, b.row_start, b.col_start, k1, k2);
      s1 += z * ys[i];
      s2 += z * z;
    }
    double f = s2 > 0 ? ysq - s1 * s1 / s2 : ysq;
    out.resid.at(b.row_start - 1, b.col_start - 1) = f;
    out.mu.at(b.row_start - 1, b.col_start - 1) = s2 > 0 ? s1 / s2 : 0.0;
    if (!have || f < best_f) {
      best_f = f;
      out.best = b;
      have = true;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("block sums match the window oracle") {
  Rng rng(RngHandle{2, 0});
  for (auto [n1, n2, k1, k2] : {std::array<int, 4>{7, 9, 3, 2},
                                std::array<int, 4>{5, 5, 1, 1},
                                std::array<int, 4>{6, 4, 6, 4},
                                std::array<int, 4>{12, 3, 2, 3}}) {
    SensingMatrix x = gaussian_sensing(n1, n2, rng);
    PositionGrid z = block_sums(x, k1, k2);
    CHECK(z.rows == n1 - k1 + 1);
    CHECK(z.cols == n2 - k2 + 1);
    std::vector<double> dense = x.to_dense();
    for (int r = 0; r < z.rows; ++r)
      for (int c = 0; c < z.cols; ++c)
        CHECK(z.at(r, c) == doctest::Approx(block_sum_naive(dense, x.shape(), r + 1,
                                                            c + 1, k1, k2))
                                .epsilon(1e-12));
  }
}

TEST_CASE("single-block least squares, by hand") {
  // z = (1, 1), y = (2, 0): mu_hat = 1, residual = 4 - 4/2 = 2.
  auto [mu, resid] = score({1.0, 1.0}, {2.0, 0.0});
  CHECK(mu == doctest::Approx(1.0));
  CHECK(resid == doctest::Approx(2.0));
  // Zero sensing mass: nothing explained, estimate pinned to zero.
  auto [mu0, resid0] = score({0.0, 0.0}, {2.0, 0.0});
  CHECK(mu0 == 0.0);
  CHECK(resid0 == doctest::Approx(4.0));
}

TEST_CASE("score table agrees with the naive search on random instances") {
  Rng rng(RngHandle{31, 0});
  for (int rep = 0; rep < 20; ++rep) {
    int k1 = 1 + static_cast<int>(rng.below(3));
    int k2 = 1 + static_cast<int>(rng.below(3));
    int n1 = k1 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(12 - k1)));
    int n2 = k2 + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(12 - k2)));
    long long m = 1 + static_cast<long long>(rng.below(8));
    SignalInstance inst = sample_instance(n1, n2, k1, k2, 2.0, 1.0, rng);

    std::vector<SensingMatrix> xs;
    std::vector<double> ys;
    BudgetLedger ledger(m);
    ScoreTable table(inst.shape(), k1, k2);
    for (long long i = 0; i < m; ++i) {
      SensingMatrix x = gaussian_sensing(n1, n2, rng);
      double y = measure(inst, x, rng, ledger, Phase::Passive).y;
      table.accumulate(block_sums(x, k1, k2), y);
      xs.push_back(x);
      ys.push_back(y);
    }

    NaiveLs naive = naive_least_squares(inst.shape(), k1, k2, xs, ys);
    for (int r = 0; r < naive.resid.rows; ++r)
      for (int c = 0; c < naive.resid.cols; ++c) {
        double want = naive.resid.at(r, c);
        double got = table.residual(r, c);
        CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        CHECK(table.mu_hat(r, c) ==
              doctest::Approx(naive.mu.at(r, c)).epsilon(1e-9));
      }
    CHECK(table.best_block() == naive.best);
  }
}

TEST_CASE("ties break to the first position in row-major order") {
  // A constant sensing matrix gives every placement the same block sum, so
  // all residuals tie and the scan must keep (1, 1).
  ScoreTable table({6, 6}, 2, 2);
  table.accumulate(block_sums(allones_sensing(6, 6), 2, 2), 1.0);
  Block best = table.best_block();
  CHECK(best.row_start == 1);
  CHECK(best.col_start == 1);
}

TEST_CASE("noiseless instances are recovered exactly") {
  Rng rng(RngHandle{77, 0});
  for (int rep = 0; rep < 30; ++rep) {
    SignalInstance inst = sample_instance(16, 16, 4, 4, 1.0, 1e-12, rng);
    PassiveResult res = localize_passive(inst, 5, rng);
    CHECK(res.block == inst.b_star);
    CHECK(res.table.mu_hat(res.block) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("success curve fields are consistent and the curve moves up") {
  std::vector<double> grid = {0.25, 4.0};
  auto pts =
      passive_snr_threshold_empirical(8, 2, 40, grid, 60, 1.0, RngHandle{10, 0});
  REQUIRE(pts.size() == 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].snr == grid[i]);
    CHECK(pts[i].snr_rescaled ==
          doctest::Approx(grid[i] * std::sqrt(2.0 * 40) / 8.0).epsilon(1e-12));
    CHECK(pts[i].trials == 60);
    CHECK(pts[i].successes <= 60);
    CHECK(pts[i].phat == doctest::Approx(pts[i].successes / 60.0));
  }
  CHECK(pts[1].phat > pts[0].phat);
  CHECK(pts[1].phat > 0.9);  // snr 4 on an 8x8 with 40 measurements is easy

  // Identical results regardless of the thread count.
  auto pts3 =
      passive_snr_threshold_empirical(8, 2, 40, grid, 60, 1.0, RngHandle{10, 0}, 3);
  REQUIRE(pts3.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(pts3[i].successes == pts[i].successes);
}

TEST_CASE("large grid stays fast") {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(RngHandle{55, 0});
  SignalInstance inst = sample_instance(128, 128, 8, 8, 3.0, 1.0, rng);
  PassiveResult res = localize_passive(inst, 100, rng);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(res.block.height == 8);
}
