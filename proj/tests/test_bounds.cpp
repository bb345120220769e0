#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "blocksense/bounds.hpp"

using namespace blocksense;

namespace {

BoundQuery q(int n, int k, long long m, double sigma = 1.0, double risk = 0.1) {
  return BoundQuery{n, n, k, k, m, sigma, risk};
}

}  // namespace

TEST_CASE("hand-computed spot values") {
  // 0.5 * sqrt(16*60*60 / (100*256)) = 0.75
  CHECK(detection_lb(q(64, 4, 100, 1.0, 0.5)).value ==
        doctest::Approx(0.75).epsilon(1e-12));
  // 2 * 0.5 * sqrt(16*12*12/(100*256)) = 0.3
  CHECK(detection_lb(q(16, 4, 100, 2.0, 0.5)).value ==
        doctest::Approx(0.3).epsilon(1e-12));
  // sqrt(8*256*4/(128*256)) = 0.5 at risk e^-4
  CHECK(detection_ub(q(16, 4, 128, 1.0, std::exp(-4.0))).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  // branch max(1/4, log(12)/16) = 1/4: sqrt(256/100 * 0.25) = 0.8
  CHECK(passive_loc_lb(q(16, 4, 100)).value == doctest::Approx(0.8).epsilon(1e-12));
  // log(2/risk) = 1 at risk 2/e; branch log(4)/4: sqrt(10.24 * log(4)/4)
  CHECK(passive_loc_ub(q(16, 4, 25, 1.0, 2.0 / std::exp(1.0))).value ==
        doctest::Approx(1.8838560360247596).epsilon(1e-12));
  // per-coordinate term sqrt(8/(m*k)) dominates the interval-count term here
  CHECK(active_loc_lb(q(16, 4, 100, 1.0, 0.5)).value ==
        doctest::Approx(0.07071067811865475).epsilon(1e-12));
  CHECK(active_loc_ub(q(64, 4, 11000)).value ==
        doctest::Approx(1.3788940851829794).epsilon(1e-12));
  CHECK(bicluster_passive_ub(q(16, 4, 100, 1.0, 2.0 / std::exp(1.0))).value ==
        doctest::Approx(1.2610869343008515).epsilon(1e-12));
  CHECK(bicluster_passive_lb(q(16, 4, 100)).value ==
        doctest::Approx(1.40906298085713).epsilon(1e-12));
}

TEST_CASE("homogeneity in sigma and the 1/sqrt(m) law") {
  auto evals = {+[](const BoundQuery& b) { return detection_lb(b).value; },
                +[](const BoundQuery& b) { return detection_ub(b).value; },
                +[](const BoundQuery& b) { return passive_loc_lb(b).value; },
                +[](const BoundQuery& b) { return passive_loc_ub(b).value; },
                +[](const BoundQuery& b) { return active_loc_lb(b).value; },
                +[](const BoundQuery& b) { return active_loc_ub(b).value; },
                +[](const BoundQuery& b) { return bicluster_passive_ub(b).value; },
                +[](const BoundQuery& b) { return bicluster_passive_lb(b).value; }};
  for (auto f : evals) {
    BoundQuery base = q(32, 4, 100);
    BoundQuery sig2 = base, m4 = base;
    sig2.sigma = 2.0;
    m4.m = 400;
    CHECK(f(sig2) == doctest::Approx(2 * f(base)).epsilon(1e-12));
    CHECK(f(m4) == doctest::Approx(f(base) / 2).epsilon(1e-12));
  }
}

TEST_CASE("upper bounds dominate their lower bounds on a parameter grid") {
  for (int n : {16, 32, 64, 128}) {
    for (int k : {2, 4, 8}) {
      for (long long m : {50ll, 200ll, 1000ll}) {
        CHECK(detection_ub(q(n, k, m)).value > detection_lb(q(n, k, m)).value);
        CHECK(passive_loc_ub(q(n, k, m)).value > passive_loc_lb(q(n, k, m)).value);
        CHECK(active_loc_ub(q(n, k, m)).value > active_loc_lb(q(n, k, m)).value);
      }
    }
  }
}

TEST_CASE("binomial log-counts match exact integer values") {
  CHECK(log_choose(12, 4) == doctest::Approx(std::log(495.0)).epsilon(1e-12));
  CHECK(log_choose(30, 15) == doctest::Approx(18.85969358114838).epsilon(1e-12));
  CHECK(log_choose(7, 0) == 0.0);
  CHECK(log_choose(7, 7) == 0.0);
  CHECK(std::isinf(log_choose(5, 6)));
  CHECK(log_choose(5, 6) < 0);
  CHECK(std::isinf(log_choose(5, -1)));
  // Exact check over a small triangle.
  for (int n = 1; n <= 20; ++n) {
    double c = 1;
    for (int k = 0; k <= n; ++k) {
      CHECK(log_choose(n, k) == doctest::Approx(std::log(c)).epsilon(1e-12));
      c = c * (n - k) / (k + 1);
    }
  }
}

TEST_CASE("degenerate geometries flag instead of dividing by zero") {
  BoundResult r = detection_lb(q(16, 16, 100));
  CHECK(r.infinite);
  CHECK(std::isinf(r.value));
  CHECK(detection_lb(BoundQuery{16, 8, 16, 4, 100, 1.0, 0.1}).infinite);
  CHECK_FALSE(detection_ub(q(16, 16, 100)).infinite);  // sufficiency still finite

  CHECK(passive_loc_lb(q(16, 16, 100)).infinite);
  CHECK_FALSE(passive_loc_lb(BoundQuery{16, 8, 16, 4, 100, 1.0, 0.1}).infinite);
  CHECK(bicluster_passive_ub(q(16, 16, 100)).infinite);
  CHECK(bicluster_passive_lb(BoundQuery{16, 8, 16, 4, 100, 1.0, 0.1}).infinite);

  // Half-width blocks empty both interval-counting branches.
  BoundResult a = active_loc_lb(q(8, 4, 100));
  CHECK(a.first_branch_dropped);
  CHECK(a.value > 0);
  CHECK_FALSE(active_loc_lb(q(64, 4, 100)).first_branch_dropped);

  // k = 1 has no within-block search term.
  BoundResult u = active_loc_ub(q(64, 1, 1000));
  CHECK_FALSE(u.infinite);
  CHECK(u.value ==
        doctest::Approx(std::sqrt(352.0 * 4096 * std::log(41.0) / 1000.0)).epsilon(1e-12));
}

TEST_CASE("side condition on the passive upper bound is reported") {
  CHECK(passive_loc_ub(q(16, 4, 100)).side_condition_met);
  // log(12) > 2, so m = 2 fails the default C1 = 1 side condition.
  CHECK_FALSE(passive_loc_ub(q(16, 4, 2)).side_condition_met);
  CHECK(passive_loc_ub(q(16, 4, 2), 0.5).side_condition_met);
}

TEST_CASE("constant knobs scale the right pieces") {
  CHECK(passive_loc_lb(q(16, 4, 100), 3.0).value ==
        doctest::Approx(3 * passive_loc_lb(q(16, 4, 100)).value).epsilon(1e-12));
  CHECK(passive_loc_ub(q(16, 4, 100), 1.0, 2.5).value ==
        doctest::Approx(2.5 * passive_loc_ub(q(16, 4, 100)).value).epsilon(1e-12));
  CHECK(bicluster_passive_ub(q(16, 4, 100), 2.0).value ==
        doctest::Approx(2 * bicluster_passive_ub(q(16, 4, 100)).value).epsilon(1e-12));
  CHECK(bicluster_passive_lb(q(16, 4, 100), 2.0).value ==
        doctest::Approx(2 * bicluster_passive_lb(q(16, 4, 100)).value).epsilon(1e-12));
}

TEST_CASE("malformed queries are rejected") {
  CHECK_THROWS_AS(detection_lb(q(16, 17, 100)), std::invalid_argument);
  CHECK_THROWS_AS(detection_ub(q(16, 4, 0)), std::invalid_argument);
  CHECK_THROWS_AS(passive_loc_lb(q(0, 0, 100)), std::invalid_argument);
  CHECK_THROWS_AS(passive_loc_ub(q(16, 4, 100, 1.0, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(active_loc_ub(q(16, 4, 100, 1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(active_loc_lb(q(16, 4, 100, -1.0)), std::invalid_argument);
}
