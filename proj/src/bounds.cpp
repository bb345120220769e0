#include "blocksense/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace blocksense {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const BoundQuery& q) {
  if (q.n1 < 1 || q.n2 < 1 || q.k1 < 1 || q.k2 < 1)
    throw std::invalid_argument("bound query: dimensions must be positive");
  if (q.k1 > q.n1 || q.k2 > q.n2)
    throw std::invalid_argument("bound query: k must not exceed n");
  if (q.m < 1) throw std::invalid_argument("bound query: m must be positive");
  if (q.sigma < 0) throw std::invalid_argument("bound query: sigma must be non-negative");
  if (q.risk <= 0 || q.risk >= 1)
    throw std::invalid_argument("bound query: risk level must be in (0,1)");
}

BoundResult degenerate() { return BoundResult{kInf, true, false, true}; }

double dmin(double a, double b) { return a < b ? a : b; }
double dmax(double a, double b) { return a > b ? a : b; }

}  // namespace

double log_choose(long long n, long long k) {
  if (k < 0 || k > n) return -kInf;
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

BoundResult detection_lb(const BoundQuery& q) {
  validate(q);
  if (q.k1 == q.n1 || q.k2 == q.n2) return degenerate();
  double num = 16.0 * (q.n1 - q.k1) * (q.n2 - q.k2);
  double den = static_cast<double>(q.m) * q.k1 * q.k1 * q.k2 * q.k2;
  BoundResult r;
  r.value = q.sigma * (1.0 - q.risk) * std::sqrt(num / den);
  return r;
}

BoundResult detection_ub(const BoundQuery& q) {
  validate(q);
  double num = 8.0 * q.n1 * q.n2 * std::log(1.0 / q.risk);
  double den = static_cast<double>(q.m) * q.k1 * q.k1 * q.k2 * q.k2;
  BoundResult r;
  r.value = q.sigma * std::sqrt(num / den);
  return r;
}

BoundResult passive_loc_lb(const BoundQuery& q, double C) {
  validate(q);
  if (q.k1 == q.n1 && q.k2 == q.n2) return degenerate();
  double nk = dmax(q.n1 - q.k1, q.n2 - q.k2);
  double branch = dmax(1.0 / dmin(q.k1, q.k2),
                       std::log(nk) / (static_cast<double>(q.k1) * q.k2));
  BoundResult r;
  r.value = C * q.sigma *
            std::sqrt(static_cast<double>(q.n1) * q.n2 / q.m * branch);
  return r;
}

BoundResult passive_loc_ub(const BoundQuery& q, double C1, double C2) {
  validate(q);
  if (q.k1 == q.n1 && q.k2 == q.n2) return degenerate();
  double nk = dmax(q.n1 - q.k1, q.n2 - q.k2);
  double branch = dmax(std::log(dmax(q.k1, q.k2)) / dmin(q.k1, q.k2),
                       std::log(nk) / (static_cast<double>(q.k1) * q.k2));
  BoundResult r;
  r.value = C2 * q.sigma *
            std::sqrt(static_cast<double>(q.n1) * q.n2 / q.m * std::log(2.0 / q.risk) *
                      branch);
  r.side_condition_met = static_cast<double>(q.m) >= C1 * std::log(nk);
  return r;
}

BoundResult active_loc_lb(const BoundQuery& q) {
  validate(q);
  if (q.k1 == q.n1 && q.k2 == q.n2) return degenerate();
  double t1 = (q.n1 - q.k1) * (q.n2 / 2.0 - q.k2);
  double t2 = (q.n1 / 2.0 - q.k1) * (q.n2 - q.k2);
  double first = dmax(t1, t2);
  double kk = static_cast<double>(q.k1) * q.k1 * q.k2 * q.k2;
  BoundResult r;
  double second = std::sqrt(8.0 / (static_cast<double>(q.m) * dmin(q.k1, q.k2)));
  if (first > 0) {
    r.value = q.sigma * (1.0 - q.risk) *
              dmax(std::sqrt(2.0 * first / (static_cast<double>(q.m) * kk)), second);
  } else {
    r.value = q.sigma * (1.0 - q.risk) * second;
    r.first_branch_dropped = true;
  }
  return r;
}

BoundResult active_loc_ub(const BoundQuery& q) {
  validate(q);
  double s2 = q.sigma * q.sigma;
  double kk = static_cast<double>(q.k1) * q.k1 * q.k2 * q.k2;
  double b1 = std::sqrt(352.0 * s2 * q.n1 * q.n2 * std::log(4.0 / q.risk + 1.0) /
                        (static_cast<double>(q.m) * kk));
  double kmax = dmax(q.k1, q.k2);
  double b2 = 0.0;
  if (kmax >= 2) {
    double lk = std::log(kmax);
    b2 = std::sqrt(1408.0 * s2 * lk * std::log(24.0 * lk / q.risk) /
                   (static_cast<double>(q.m) * dmin(q.k1, q.k2)));
  }
  BoundResult r;
  r.value = dmax(b1, b2);
  return r;
}

BoundResult bicluster_passive_ub(const BoundQuery& q, double C1) {
  validate(q);
  if (q.k1 == q.n1 || q.k2 == q.n2) return degenerate();
  double inner = std::log(static_cast<double>(q.n1 - q.k1) * (q.n2 - q.k2)) /
                 (static_cast<double>(q.k1) + q.k2);
  BoundResult r;
  r.value = C1 * q.sigma *
            std::sqrt(static_cast<double>(q.n1) * q.n2 / q.m * std::log(2.0 / q.risk) *
                      inner);
  return r;
}

BoundResult bicluster_passive_lb(const BoundQuery& q, double C2) {
  validate(q);
  if (q.k1 == q.n1 || q.k2 == q.n2) return degenerate();
  double t1 = std::log(static_cast<double>(q.n1 - q.k1)) / q.k2;
  double t2 = std::log(static_cast<double>(q.n2 - q.k2)) / q.k1;
  double t3 = (log_choose(q.n1 - q.k1, q.k1) + log_choose(q.n2 - q.k2, q.k2)) /
              (static_cast<double>(q.k1) * q.k2);
  BoundResult r;
  r.value = C2 * q.sigma *
            std::sqrt(static_cast<double>(q.n1) * q.n2 / q.m * dmax(t1, dmax(t2, t3)));
  return r;
}

}  // namespace blocksense
