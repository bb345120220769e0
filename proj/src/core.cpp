#include "blocksense/core.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace blocksense {

namespace {

struct Segment {
  int lo, hi;  // inclusive, plain (non-wrapping)
};

// Decomposes a possibly wrapping interval [start, start+len-1] on a ring of
// size n into one or two plain segments.
int split_interval(int start, int len, int n, std::array<Segment, 2>& out) {
  if (start + len - 1 <= n) {
    out[0] = {start, start + len - 1};
    return 1;
  }
  out[0] = {start, n};
  out[1] = {1, start + len - 1 - n};
  return 2;
}

long long seg_overlap(Segment a, Segment b) {
  int lo = a.lo > b.lo ? a.lo : b.lo;
  int hi = a.hi < b.hi ? a.hi : b.hi;
  return hi >= lo ? hi - lo + 1 : 0;
}

void check_dims(int n1, int n2, int k1, int k2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("matrix shape must be positive");
  if (k1 < 1 || k2 < 1) throw std::invalid_argument("block shape must be positive");
  if (k1 > n1 || k2 > n2)
    throw std::invalid_argument("block does not fit: k=(" + std::to_string(k1) + "," +
                                std::to_string(k2) + ") vs n=(" + std::to_string(n1) +
                                "," + std::to_string(n2) + ")");
}

}  // namespace

long long overlap_cells(const Block& a, const Block& b, Shape s) {
  std::array<Segment, 2> ar, ac, br, bc;
  int nar = split_interval(a.row_start, a.height, s.n1, ar);
  int nac = split_interval(a.col_start, a.width, s.n2, ac);
  int nbr = split_interval(b.row_start, b.height, s.n1, br);
  int nbc = split_interval(b.col_start, b.width, s.n2, bc);
  long long rows = 0, cols = 0;
  for (int i = 0; i < nar; ++i)
    for (int j = 0; j < nbr; ++j) rows += seg_overlap(ar[i], br[j]);
  for (int i = 0; i < nac; ++i)
    for (int j = 0; j < nbc; ++j) cols += seg_overlap(ac[i], bc[j]);
  return rows * cols;
}

BlockFamily::BlockFamily(Shape shape, int k1, int k2)
    : shape_(shape), k1_(k1), k2_(k2) {
  check_dims(shape.n1, shape.n2, k1, k2);
  rows_ = shape.n1 - k1 + 1;
  cols_ = shape.n2 - k2 + 1;
}

Block BlockFamily::at(long long index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("block index out of range");
  int r = static_cast<int>(index / cols_);
  int c = static_cast<int>(index % cols_);
  return Block{r + 1, c + 1, k1_, k2_, false};
}

long long BlockFamily::index_of(const Block& b) const {
  if (b.height != k1_ || b.width != k2_ || b.wrap)
    throw std::invalid_argument("block does not belong to this family");
  if (b.row_start < 1 || b.row_start > rows_ || b.col_start < 1 || b.col_start > cols_)
    throw std::out_of_range("block start out of range");
  return static_cast<long long>(b.row_start - 1) * cols_ + (b.col_start - 1);
}

BlockFamily enumerate_blocks(int n1, int n2, int k1, int k2) {
  return BlockFamily({n1, n2}, k1, k2);
}

double SignalInstance::value(int i, int j) const {
  if (i < 1 || i > n1 || j < 1 || j > n2)
    throw std::out_of_range("matrix index out of range");
  return b_star.contains(i, j, shape()) ? mu : 0.0;
}

SignalInstance make_instance(int n1, int n2, int k1, int k2, double mu,
                             double sigma, const Block& b_star) {
  check_dims(n1, n2, k1, k2);
  if (sigma < 0) throw std::invalid_argument("sigma must be non-negative");
  if (b_star.height != k1 || b_star.width != k2)
    throw std::invalid_argument("signal block must be k1 x k2");
  if (b_star.wrap) throw std::invalid_argument("signal block must not wrap");
  if (b_star.row_start < 1 || b_star.row_start + k1 - 1 > n1 || b_star.col_start < 1 ||
      b_star.col_start + k2 - 1 > n2)
    throw std::invalid_argument("signal block out of bounds");
  return SignalInstance{n1, n2, k1, k2, mu, sigma, b_star};
}

SignalInstance sample_instance(int n1, int n2, int k1, int k2, double mu,
                               double sigma, Rng& rng) {
  BlockFamily family({n1, n2}, k1, k2);
  Block b = family.at(static_cast<long long>(rng.below(family.size())));
  return make_instance(n1, n2, k1, k2, mu, sigma, b);
}

}  // namespace blocksense
