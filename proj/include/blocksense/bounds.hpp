#pragma once

namespace blocksense {

// Parameter tuple every threshold evaluator consumes.  `risk` is the level
// the caller cares about: a type-I allowance for the detection and passive
// bounds, a failure probability for the adaptive ones.
struct BoundQuery {
  int n1 = 0, n2 = 0;
  int k1 = 0, k2 = 0;
  long long m = 0;
  double sigma = 1.0;
  double risk = 0.1;
};

struct BoundResult {
  double value = 0.0;
  // Formula degenerated (k = n); value is +infinity as a sentinel.
  bool infinite = false;
  // active_loc_lb only: both terms of the first branch were non-positive.
  bool first_branch_dropped = false;
  // passive_loc_ub only: false when m < C1 * log max(n1-k1, n2-k2).
  bool side_condition_met = true;
};

// Natural log of the binomial coefficient, via log-gamma; -inf when k > n.
double log_choose(long long n, long long k);

// SNR below which no detector, however it spends its m measurements, can
// keep type I + type II risk under the query's level.
BoundResult detection_lb(const BoundQuery& q);

// SNR above which the summed-measurement test achieves risk <= 2 * level.
BoundResult detection_ub(const BoundQuery& q);

// SNR below which every estimator from non-adaptive measurements misses the
// block with constant probability.  C defaults to 1 and only sets the scale.
BoundResult passive_loc_lb(const BoundQuery& q, double C = 1.0);

// SNR at which exhaustive least squares over gaussian measurements succeeds
// with probability 1 - risk; requires m >= C1 * log max(n1-k1, n2-k2),
// reported through side_condition_met.
BoundResult passive_loc_ub(const BoundQuery& q, double C1 = 1.0, double C2 = 1.0);

// SNR below which even adaptive measurement schemes fail to localize.
BoundResult active_loc_lb(const BoundQuery& q);

// SNR at which the 22-unit adaptive pipeline localizes with probability
// 1 - risk (explicit constants, no hidden factors).
BoundResult active_loc_ub(const BoundQuery& q);

// Variants of the passive localization thresholds when the activation is a
// combinatorial bicluster (any k1 rows x k2 columns) instead of contiguous.
BoundResult bicluster_passive_ub(const BoundQuery& q, double C1 = 1.0);
BoundResult bicluster_passive_lb(const BoundQuery& q, double C2 = 1.0);

}  // namespace blocksense
