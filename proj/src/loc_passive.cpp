#include "blocksense/loc_passive.hpp"

#include <cmath>
#include <stdexcept>

#include "blocksense/parallel.hpp"

namespace blocksense {

PositionGrid block_sums(const SensingMatrix& x, int k1, int k2) {
  Shape s = x.shape();
  if (k1 < 1 || k2 < 1 || k1 > s.n1 || k2 > s.n2)
    throw std::invalid_argument("block_sums: block does not fit");
  std::vector<double> dense;
  const std::vector<double>* data;
  if (const auto* d = std::get_if<SensingMatrix::Dense>(&x.rep())) {
    data = d->data.get();
  } else {
    dense = x.to_dense();
    data = &dense;
  }

  // prefix[(i)*(n2+1)+j] = sum of X[1..i][1..j]
  std::vector<double> prefix(static_cast<size_t>(s.n1 + 1) * (s.n2 + 1), 0.0);
  for (int i = 1; i <= s.n1; ++i) {
    const double* row = data->data() + static_cast<size_t>(i - 1) * s.n2;
    double run = 0;
    double* pr = prefix.data() + static_cast<size_t>(i) * (s.n2 + 1);
    const double* pu = prefix.data() + static_cast<size_t>(i - 1) * (s.n2 + 1);
    for (int j = 1; j <= s.n2; ++j) {
      run += row[j - 1];
      pr[j] = pu[j] + run;
    }
  }

  PositionGrid z(s.n1 - k1 + 1, s.n2 - k2 + 1);
  for (int r = 0; r < z.rows; ++r) {
    const double* top = prefix.data() + static_cast<size_t>(r) * (s.n2 + 1);
    const double* bot = prefix.data() + static_cast<size_t>(r + k1) * (s.n2 + 1);
    for (int c = 0; c < z.cols; ++c)
      z.at(r, c) = bot[c + k2] - bot[c] - top[c + k2] + top[c];
  }
  return z;
}

std::pair<double, double> score(const std::vector<double>& z, const std::vector<double>& y) {
  if (z.size() != y.size()) throw std::invalid_argument("score: length mismatch");
  double s1 = 0, s2 = 0, ysq = 0;
  for (size_t i = 0; i < z.size(); ++i) {
    s1 += z[i] * y[i];
    s2 += z[i] * z[i];
    ysq += y[i] * y[i];
  }
  if (s2 <= 0.0) return {0.0, ysq};
  return {s1 / s2, ysq - s1 * s1 / s2};
}

ScoreTable::ScoreTable(Shape shape, int k1, int k2)
    : shape_(shape),
      k1_(k1),
      k2_(k2),
      s1_(shape.n1 - k1 + 1, shape.n2 - k2 + 1),
      s2_(shape.n1 - k1 + 1, shape.n2 - k2 + 1) {
  if (k1 < 1 || k2 < 1 || k1 > shape.n1 || k2 > shape.n2)
    throw std::invalid_argument("ScoreTable: block does not fit");
}

void ScoreTable::accumulate(const PositionGrid& z, double y) {
  if (z.rows != s1_.rows || z.cols != s1_.cols)
    throw std::invalid_argument("ScoreTable: grid shape mismatch");
  for (size_t i = 0; i < z.v.size(); ++i) {
    s1_.v[i] += z.v[i] * y;
    s2_.v[i] += z.v[i] * z.v[i];
  }
  y_sq_ += y * y;
  ++m_;
}

double ScoreTable::residual(int pr, int pc) const {
  double s2 = s2_.at(pr, pc);
  if (s2 <= 0.0) return y_sq_;
  double s1 = s1_.at(pr, pc);
  return y_sq_ - s1 * s1 / s2;
}

double ScoreTable::mu_hat(int pr, int pc) const {
  double s2 = s2_.at(pr, pc);
  return s2 <= 0.0 ? 0.0 : s1_.at(pr, pc) / s2;
}

double ScoreTable::residual(const Block& b) const {
  return residual(b.row_start - 1, b.col_start - 1);
}

double ScoreTable::mu_hat(const Block& b) const {
  return mu_hat(b.row_start - 1, b.col_start - 1);
}

Block ScoreTable::best_block() const {
  // Minimizing ||y||^2 - S1^2/S2 is maximizing S1^2/S2; a strict-improvement
  // row-major scan makes ties land on the lexicographically smallest start.
  int br = 0, bc = 0;
  double best = -1.0;
  for (int r = 0; r < s1_.rows; ++r)
    for (int c = 0; c < s1_.cols; ++c) {
      double s2 = s2_.at(r, c);
      double gain = s2 <= 0.0 ? 0.0 : s1_.at(r, c) * s1_.at(r, c) / s2;
      if (gain > best) {
        best = gain;
        br = r;
        bc = c;
      }
    }
  return Block{br + 1, bc + 1, k1_, k2_, false};
}

PassiveResult localize_passive(const SignalInstance& inst, long long m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("localize_passive: need at least one measurement");
  BudgetLedger ledger(m);
  ScoreTable table(inst.shape(), inst.k1, inst.k2);
  for (long long i = 0; i < m; ++i) {
    SensingMatrix x = gaussian_sensing(inst.n1, inst.n2, rng);
    MeasurementRecord rec = measure(inst, x, rng, ledger, Phase::Passive);
    table.accumulate(block_sums(x, inst.k1, inst.k2), rec.y);
  }
  Block best = table.best_block();
  return PassiveResult{best, std::move(table)};
}

std::vector<CurvePoint> passive_snr_threshold_empirical(int n, int k, long long m,
                                                        const std::vector<double>& snr_grid,
                                                        long long trials, double sigma,
                                                        RngHandle rng, int threads) {
  if (snr_grid.empty()) throw std::invalid_argument("snr grid must be non-empty");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  std::vector<CurvePoint> out(snr_grid.size());
  double rescale = std::sqrt(static_cast<double>(k) * m) / n;
  for (size_t gi = 0; gi < snr_grid.size(); ++gi) {
    double snr = snr_grid[gi];
    std::vector<unsigned char> ok(trials, 0);
    parallel_for(trials, threads, [&](long long t) {
      Rng r(rng.derive(gi, t));
      SignalInstance inst = sample_instance(n, n, k, k, snr * sigma, sigma, r);
      ok[t] = localize_passive(inst, m, r).block == inst.b_star ? 1 : 0;
    });
    long long succ = 0;
    for (auto b : ok) succ += b;
    CurvePoint& p = out[gi];
    p.snr = snr;
    p.snr_rescaled = snr * rescale;
    p.successes = succ;
    p.trials = trials;
    p.phat = static_cast<double>(succ) / trials;
    p.stderr_phat = std::sqrt(p.phat * (1 - p.phat) / trials);
  }
  return out;
}

}  // namespace blocksense
