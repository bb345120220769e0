#pragma once

#include <cstdint>
#include <vector>

#include "blocksense/rng.hpp"

namespace blocksense {

struct Shape {
  int n1 = 0;
  int n2 = 0;
  long long cells() const { return static_cast<long long>(n1) * n2; }
  bool operator==(const Shape&) const = default;
};

// An axis-aligned rectangle of matrix cells, 1-based inclusive indexing.
// A block may wrap around the torus edge (used by the shifted tilings the
// adaptive search measures against); the signal block itself never wraps.
struct Block {
  int row_start = 1;
  int col_start = 1;
  int height = 0;
  int width = 0;
  bool wrap = false;

  long long cells() const { return static_cast<long long>(height) * width; }

  // Membership on the torus of the given shape.  For non-wrapping blocks the
  // shape only matters for index validity, not for the answer.
  bool contains(int i, int j, Shape s) const {
    int dr = i - row_start;
    if (dr < 0) dr += s.n1;
    int dc = j - col_start;
    if (dc < 0) dc += s.n2;
    return dr >= 0 && dr < height && dc >= 0 && dc < width;
  }

  bool operator==(const Block&) const = default;
};

// Number of cells shared by two blocks on the torus `s`.  Either block may
// wrap; a wrapped interval is split into its at most two plain segments and
// overlaps are summed segment by segment.
long long overlap_cells(const Block& a, const Block& b, Shape s);

// All contiguous k1 x k2 placements inside an n1 x n2 matrix, row-major by
// (row_start, col_start).  This is the hypothesis class the localizers search.
class BlockFamily {
 public:
  BlockFamily(Shape shape, int k1, int k2);

  Shape shape() const { return shape_; }
  int k1() const { return k1_; }
  int k2() const { return k2_; }
  long long size() const { return static_cast<long long>(rows_) * cols_; }
  int position_rows() const { return rows_; }
  int position_cols() const { return cols_; }
  Block at(long long index) const;
  long long index_of(const Block& b) const;

 private:
  Shape shape_;
  int k1_, k2_;
  int rows_, cols_;  // number of admissible row / column starts
};

BlockFamily enumerate_blocks(int n1, int n2, int k1, int k2);

// One simulated ground truth: a matrix that is mu on the cells of b_star and
// zero elsewhere, observed through measurements with noise level sigma.
struct SignalInstance {
  int n1 = 0;
  int n2 = 0;
  int k1 = 0;
  int k2 = 0;
  double mu = 0.0;
  double sigma = 1.0;
  Block b_star;

  Shape shape() const { return {n1, n2}; }
  double value(int i, int j) const;  // entry of the signal matrix, 1-based
};

// Builds an instance with an explicitly placed block; validates geometry.
SignalInstance make_instance(int n1, int n2, int k1, int k2, double mu,
                             double sigma, const Block& b_star);

// Draws the block position uniformly over all placements.
SignalInstance sample_instance(int n1, int n2, int k1, int k2, double mu,
                               double sigma, Rng& rng);

}  // namespace blocksense
