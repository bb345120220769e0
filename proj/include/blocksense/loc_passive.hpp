#pragma once

#include <utility>
#include <vector>

#include "blocksense/core.hpp"
#include "blocksense/measure.hpp"

namespace blocksense {

// Values indexed by block position (row_start, col_start), both 0-based here;
// position (r, c) corresponds to the block starting at (r+1, c+1).
struct PositionGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  PositionGrid() = default;
  PositionGrid(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

// Sum of X over every k1 x k2 block placement, all positions at once via a
// 2-D prefix sum, O(n1*n2) total.
PositionGrid block_sums(const SensingMatrix& x, int k1, int k2);

// Least squares for a single candidate block given its per-measurement
// sensing mass z_i: returns (mu_hat, residual).  With ||z|| = 0 the residual
// is ||y||^2 and mu_hat is 0.
std::pair<double, double> score(const std::vector<double>& z, const std::vector<double>& y);

// Accumulates, across measurements, the two sufficient statistics the
// residual needs per position: S1 = sum z*y and S2 = sum z^2.  The full
// residual at a position is ||y||^2 - S1^2/S2.
class ScoreTable {
 public:
  ScoreTable(Shape shape, int k1, int k2);

  void accumulate(const PositionGrid& z, double y);

  Shape shape() const { return shape_; }
  int k1() const { return k1_; }
  int k2() const { return k2_; }
  long long measurements() const { return m_; }
  double y_squared() const { return y_sq_; }

  double residual(int pr, int pc) const;  // f at 0-based position
  double mu_hat(int pr, int pc) const;
  double residual(const Block& b) const;
  double mu_hat(const Block& b) const;

  // Position minimizing the residual; ties break to the smallest
  // (row_start, col_start) lexicographically.
  Block best_block() const;

  const PositionGrid& s1() const { return s1_; }
  const PositionGrid& s2() const { return s2_; }

 private:
  Shape shape_;
  int k1_, k2_;
  PositionGrid s1_, s2_;
  double y_sq_ = 0.0;
  long long m_ = 0;
};

struct PassiveResult {
  Block block;
  ScoreTable table;
};

// Non-adaptive localizer: m gaussian measurements, then exhaustive least
// squares over every block position.  O(m * n1 * n2) time.
PassiveResult localize_passive(const SignalInstance& inst, long long m, Rng& rng);

struct CurvePoint {
  double snr = 0.0;
  double snr_rescaled = 0.0;
  long long successes = 0;
  long long trials = 0;
  double phat = 0.0;
  double stderr_phat = 0.0;
};

// Empirical success curve of the passive localizer on square n x n matrices
// with k x k blocks: for each snr value runs `trials` independent instances
// at mu = snr * sigma and counts exact recoveries.  The rescaled abscissa is
// snr * sqrt(k * m) / n.
std::vector<CurvePoint> passive_snr_threshold_empirical(int n, int k, long long m,
                                                        const std::vector<double>& snr_grid,
                                                        long long trials, double sigma,
                                                        RngHandle rng, int threads = 1);

}  // namespace blocksense
