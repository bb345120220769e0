#pragma once

#include <vector>

#include "blocksense/core.hpp"
#include "blocksense/measure.hpp"

namespace blocksense {

// Rejection cutoff for the summed-measurement test at level alpha:
// sigma * sqrt(2 m log(1/alpha)).
double detection_threshold(long long m, double sigma, double alpha);

struct DetectionOutcome {
  double statistic = 0.0;  // sum of the m observations
  double threshold = 0.0;
  bool reject = false;     // reject <=> statistic > threshold
};

// Takes m measurements against the all-ones sensing matrix and compares the
// summed response to the cutoff.  This is the whole detector: one fixed
// matrix, no adaptivity.
DetectionOutcome run_detection(const SignalInstance& inst, long long m, double alpha,
                               Rng& rng);

struct DetectParams {
  int n1 = 0, n2 = 0, k1 = 0, k2 = 0;
  double sigma = 1.0;
  long long m = 0;
  double alpha = 0.05;
};

struct DetectRiskRow {
  double mu = 0.0;
  double type_one = 0.0;   // reject rate with no signal present
  double type_two = 0.0;   // accept rate with the block present
  double risk = 0.0;       // type_one + type_two
  long long trials = 0;
  double stderr_risk = 0.0;
};

// Monte Carlo risk estimate over a grid of signal amplitudes.  Null trials
// use mu = 0; alternative trials draw the block position uniformly (by
// symmetry of the all-ones matrix the position does not matter).
std::vector<DetectRiskRow> estimate_detection_risk(const DetectParams& params,
                                                   const std::vector<double>& mu_grid,
                                                   long long trials, RngHandle rng);

}  // namespace blocksense
