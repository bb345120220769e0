#pragma once

#include <array>
#include <vector>

#include "blocksense/core.hpp"
#include "blocksense/measure.hpp"

namespace blocksense {

enum class CollectionLabel { D1, D2, D3, D4 };

// One tiling of the (torus) matrix by 2k1 x 2k2 blocks, shifted by
// (row_shift, col_shift).  Tiles are pairwise disjoint and cover the matrix;
// with a non-zero shift the seam tiles wrap around the edge.
struct BlockCollection {
  CollectionLabel label = CollectionLabel::D1;
  Shape shape;  // torus the tiles cover (padded if need be)
  int k1 = 0, k2 = 0;
  int row_shift = 0, col_shift = 0;
  std::vector<Block> tiles;

  int p() const { return static_cast<int>(tiles.size()); }
};

// The four shifted tilings the coarse search measures against: shifts
// (0,0), (k1,k2), (k1,0), (0,k2).  Any non-wrapping k1 x k2 block is fully
// inside a tile of at least one of them.
struct Collections {
  std::array<BlockCollection, 4> d;
  Shape padded;    // tiling domain; equals original when no padding needed
  Shape original;
};

// Smallest (N1, N2) >= (n1, n2) with N1 % 2k1 == 0, N2 % 2k2 == 0 and
// (N1/2k1) * (N2/2k2) a power of two.  The extra rows/columns carry zero
// signal; the signal block never lies in them.
Shape padded_shape(int n1, int n2, int k1, int k2);

Collections build_collections(int n1, int n2, int k1, int k2);

// Per-level measurement counts for the halving search: level s of s0 gets
// floor((m - s0) * s * 2^-(s+1)) + 1 shots.  Their sum never exceeds m.
std::vector<long long> cbs_allocation(long long m, int s0);

// Compressive binary search over one collection: log2(p) rounds of signed
// half-versus-half sensing, keeping the half with the larger summed
// response.  Returns the surviving tile.  Requires m >= 2 * log2(p).
Block cbs_run(const SignalInstance& inst, const BlockCollection& coll, long long m,
              Rng& rng, BudgetLedger& ledger, Transcript* sink = nullptr);

// Row and column index sets (sorted, 1-based) collected from the four
// coarse-search winners.  At most 8k1 rows and 8k2 columns.  The signal
// block's rows and columns, when covered, occupy consecutive entries.
struct Region {
  std::vector<int> rows;
  std::vector<int> cols;
};

Region region_from_blocks(const std::vector<Block>& winners, Shape shape);

// Runs the coarse search on all four collections and pools the winners'
// extents.  Budget: m_unit per collection run.
Region approx_localize(const SignalInstance& inst, const Collections& colls,
                       long long m_unit, Rng& rng, BudgetLedger& ledger,
                       Transcript* sink = nullptr);

// Two parameterizations of the exact stage (CLI tokens `proof` and `box`):
//  - Proof: candidates every k-th collected column across the whole region,
//    scan budget 8 * m_unit split equally, then a per-column search budget
//    of floor(m_unit / (3 ln k)).
//  - Box: the combined stage budget m = 9 * m_unit is split as four fixed
//    candidates at floor(m / 5) shots each, search budget floor(m / (6 log2 k)).
enum class ActiveVariant { Proof, Box };

// Stage 1: measure whole candidate columns through the region's rows and
// keep the argmax.  Stage 2: binary search for the right edge of the active
// run, thresholding each probe.  Returns the k2 recovered columns (actual
// indices, ascending).  `delta` is this call's failure allowance.
std::vector<int> exact_localize_columns(const SignalInstance& inst, const Region& region,
                                        long long m_unit, double delta, ActiveVariant v,
                                        Rng& rng, BudgetLedger& ledger,
                                        Transcript* sink = nullptr);

// Mirror image of exact_localize_columns with rows and columns swapped.
std::vector<int> exact_localize_rows(const SignalInstance& inst, const Region& region,
                                     long long m_unit, double delta, ActiveVariant v,
                                     Rng& rng, BudgetLedger& ledger,
                                     Transcript* sink = nullptr);

struct ActiveOptions {
  ActiveVariant variant = ActiveVariant::Proof;
  Transcript* transcript = nullptr;
};

struct ActiveResult {
  Block block;
  Region region;
  BudgetLedger ledger;   // final per-phase accounting for this run
  long long m_unit = 0;
};

// Full adaptive localizer on a budget of `budget` measurements, split into
// 22 units: 4 for the coarse runs, 8 + 8 for the column/row scans, 1 + 1
// for the two searches (the searches may spend less).  Each of the eight
// internal steps runs at failure allowance delta / 8.
// Requires budget >= 22 * max(3 ln(n1 n2), 2 log2 p).
ActiveResult localize_active(const SignalInstance& inst, long long budget, double delta,
                             Rng& rng, const ActiveOptions& opts = {});

}  // namespace blocksense
