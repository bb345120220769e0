#include "blocksense/detect.hpp"

#include <cmath>
#include <stdexcept>

namespace blocksense {

double detection_threshold(long long m, double sigma, double alpha) {
  if (m < 1) throw std::invalid_argument("detection needs at least one measurement");
  if (sigma < 0) throw std::invalid_argument("sigma must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
  return sigma * std::sqrt(2.0 * static_cast<double>(m) * std::log(1.0 / alpha));
}

DetectionOutcome run_detection(const SignalInstance& inst, long long m, double alpha,
                               Rng& rng) {
  DetectionOutcome out;
  out.threshold = detection_threshold(m, inst.sigma, alpha);
  BudgetLedger ledger(m);
  SensingMatrix x = allones_sensing(inst.n1, inst.n2);
  for (long long i = 0; i < m; ++i)
    out.statistic += measure(inst, x, rng, ledger, Phase::Detection).y;
  out.reject = out.statistic > out.threshold;
  return out;
}

std::vector<DetectRiskRow> estimate_detection_risk(const DetectParams& p,
                                                   const std::vector<double>& mu_grid,
                                                   long long trials, RngHandle rng) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (mu_grid.empty()) throw std::invalid_argument("mu grid must be non-empty");
  std::vector<DetectRiskRow> rows;
  rows.reserve(mu_grid.size());
  Block origin{1, 1, p.k1, p.k2, false};
  for (size_t gi = 0; gi < mu_grid.size(); ++gi) {
    double mu = mu_grid[gi];
    long long rejects_null = 0, accepts_alt = 0;
    for (long long t = 0; t < trials; ++t) {
      Rng r0(rng.derive(gi * 2, t));
      SignalInstance null_inst = make_instance(p.n1, p.n2, p.k1, p.k2, 0.0, p.sigma, origin);
      if (run_detection(null_inst, p.m, p.alpha, r0).reject) ++rejects_null;

      Rng r1(rng.derive(gi * 2 + 1, t));
      SignalInstance alt_inst = sample_instance(p.n1, p.n2, p.k1, p.k2, mu, p.sigma, r1);
      if (!run_detection(alt_inst, p.m, p.alpha, r1).reject) ++accepts_alt;
    }
    DetectRiskRow row;
    row.mu = mu;
    row.trials = trials;
    row.type_one = static_cast<double>(rejects_null) / trials;
    row.type_two = static_cast<double>(accepts_alt) / trials;
    row.risk = row.type_one + row.type_two;
    double n = static_cast<double>(trials);
    row.stderr_risk = std::sqrt(row.type_one * (1 - row.type_one) / n +
                                row.type_two * (1 - row.type_two) / n);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace blocksense
