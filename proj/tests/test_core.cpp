#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <stdexcept>

#include "blocksense/core.hpp"

using namespace blocksense;

namespace {

// Membership-counting oracle for overlap_cells.
long long overlap_by_counting(const Block& a, const Block& b, Shape s) {
  long long n = 0;
  for (int i = 1; i <= s.n1; ++i)
    for (int j = 1; j <= s.n2; ++j)
      if (a.contains(i, j, s) && b.contains(i, j, s)) ++n;
  return n;
}

}  // namespace

TEST_CASE("block membership, plain and wrapped") {
  Shape s{8, 8};
  Block plain{3, 4, 2, 3};
  CHECK(plain.cells() == 6);
  CHECK(plain.contains(3, 4, s));
  CHECK(plain.contains(4, 6, s));
  CHECK_FALSE(plain.contains(2, 4, s));
  CHECK_FALSE(plain.contains(3, 7, s));

  Block wrapped{7, 7, 3, 3, true};  // spans rows 7,8,1 and cols 7,8,1
  CHECK(wrapped.contains(8, 8, s));
  CHECK(wrapped.contains(1, 1, s));
  CHECK(wrapped.contains(7, 1, s));
  CHECK_FALSE(wrapped.contains(2, 7, s));
  CHECK_FALSE(wrapped.contains(4, 4, s));
}

TEST_CASE("overlap matches cell counting, including wrap") {
  Shape s{9, 11};
  Rng rng(RngHandle{42, 0});
  for (int rep = 0; rep < 300; ++rep) {
    auto rand_block = [&]() {
      int h = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n1)));
      int w = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n2)));
      int r = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n1)));
      int c = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.n2)));
      bool wraps = r + h - 1 > s.n1 || c + w - 1 > s.n2;
      return Block{r, c, h, w, wraps};
    };
    Block a = rand_block(), b = rand_block();
    CHECK(overlap_cells(a, b, s) == overlap_by_counting(a, b, s));
  }
  Block all{1, 1, 9, 11};
  CHECK(overlap_cells(all, all, s) == s.cells());
}

TEST_CASE("family enumerates placements row-major") {
  BlockFamily fam = enumerate_blocks(4, 4, 2, 2);
  CHECK(fam.size() == 9);
  CHECK(fam.at(0) == Block{1, 1, 2, 2});
  CHECK(fam.at(1) == Block{1, 2, 2, 2});
  CHECK(fam.at(2) == Block{1, 3, 2, 2});
  CHECK(fam.at(3) == Block{2, 1, 2, 2});
  CHECK(fam.at(8) == Block{3, 3, 2, 2});
  for (long long i = 0; i < fam.size(); ++i) CHECK(fam.index_of(fam.at(i)) == i);
  CHECK_THROWS_AS(fam.at(9), std::out_of_range);

  BlockFamily tall = enumerate_blocks(6, 3, 6, 1);
  CHECK(tall.size() == 3);
  CHECK(tall.at(2) == Block{1, 3, 6, 1});
}

TEST_CASE("instance construction validates geometry") {
  Block b{2, 3, 2, 2};
  SignalInstance inst = make_instance(5, 6, 2, 2, 1.5, 0.5, b);
  CHECK(inst.value(2, 3) == 1.5);
  CHECK(inst.value(3, 4) == 1.5);
  CHECK(inst.value(1, 3) == 0.0);
  CHECK(inst.value(4, 4) == 0.0);

  CHECK_THROWS_AS(make_instance(5, 6, 2, 2, 1.0, 1.0, Block{2, 3, 3, 2}),
                  std::invalid_argument);  // block size disagrees with k
  CHECK_THROWS_AS(make_instance(5, 6, 2, 2, 1.0, 1.0, Block{5, 3, 2, 2}),
                  std::invalid_argument);  // sticks out of the bottom
  CHECK_THROWS_AS(make_instance(5, 6, 2, 2, 1.0, 1.0, Block{2, 3, 2, 2, true}),
                  std::invalid_argument);  // signal block must not wrap
  CHECK_THROWS_AS(make_instance(5, 6, 2, 2, 1.0, -1.0, b), std::invalid_argument);
  CHECK_THROWS_AS(inst.value(0, 1), std::out_of_range);
  CHECK_THROWS_AS(inst.value(1, 7), std::out_of_range);
}

TEST_CASE("sampled positions are uniform over the family") {
  const int trials = 100000;
  Rng rng(RngHandle{7, 0});
  std::map<std::pair<int, int>, int> counts;
  for (int t = 0; t < trials; ++t) {
    SignalInstance inst = sample_instance(4, 4, 2, 2, 1.0, 1.0, rng);
    ++counts[{inst.b_star.row_start, inst.b_star.col_start}];
  }
  CHECK(counts.size() == 9);
  const double p = 1.0 / 9.0;
  const double sd = std::sqrt(p * (1 - p) * trials);
  for (const auto& [pos, n] : counts) {
    CHECK(n > trials * p - 4 * sd);
    CHECK(n < trials * p + 4 * sd);
  }
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngHandle h{123, 0};
  Rng a(h.derive(5, 9)), b(h.derive(5, 9)), c(h.derive(5, 10));
  bool all_equal = true, any_equal = false;
  for (int i = 0; i < 64; ++i) {
    auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
    all_equal = all_equal && x == y;
    any_equal = any_equal || x == z;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal);

  // Normal draws consume a fixed number of words: interleaving stays aligned.
  Rng d(h.derive(1)), e(h.derive(1));
  (void)d.normal();
  (void)e.normal();
  CHECK(d.next_u64() == e.next_u64());
}

TEST_CASE("normal moments are sane") {
  Rng rng(RngHandle{99, 0});
  const int n = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sumsq += z * z;
  }
  double mean = sum / n, var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
