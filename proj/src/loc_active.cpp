#include "blocksense/loc_active.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blocksense {

namespace {

bool is_pow2(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_exact(long long v) {
  int s = 0;
  while ((1ll << s) < v) ++s;
  return s;
}

long long next_pow2(long long v) {
  long long p = 1;
  while (p < v) p <<= 1;
  return p;
}

BlockCollection one_collection(CollectionLabel label, Shape padded, int k1, int k2,
                               int dr, int dc) {
  BlockCollection coll;
  coll.label = label;
  coll.shape = padded;
  coll.k1 = k1;
  coll.k2 = k2;
  coll.row_shift = dr;
  coll.col_shift = dc;
  int u1 = 2 * k1, u2 = 2 * k2;
  int q1 = padded.n1 / u1, q2 = padded.n2 / u2;
  coll.tiles.reserve(static_cast<size_t>(q1) * q2);
  for (int b = 0; b < q2; ++b)
    for (int a = 0; a < q1; ++a) {
      int rs = (dr + u1 * a) % padded.n1 + 1;
      int cs = (dc + u2 * b) % padded.n2 + 1;
      bool wrap = rs + u1 - 1 > padded.n1 || cs + u2 - 1 > padded.n2;
      coll.tiles.push_back(Block{rs, cs, u1, u2, wrap});
    }
  return coll;
}

}  // namespace

Shape padded_shape(int n1, int n2, int k1, int k2) {
  if (k1 < 1 || k2 < 1 || k1 > n1 || k2 > n2)
    throw std::invalid_argument("padded_shape: block does not fit");
  long long q1 = next_pow2((n1 + 2 * k1 - 1) / (2 * k1));
  long long q2 = next_pow2((n2 + 2 * k2 - 1) / (2 * k2));
  return Shape{static_cast<int>(2 * k1 * q1), static_cast<int>(2 * k2 * q2)};
}

Collections build_collections(int n1, int n2, int k1, int k2) {
  Shape padded = padded_shape(n1, n2, k1, k2);
  long long p = (static_cast<long long>(padded.n1) / (2 * k1)) *
                (static_cast<long long>(padded.n2) / (2 * k2));
  if (!is_pow2(p))
    throw std::invalid_argument("build_collections: padding failed to reach a dyadic tile count");
  Collections c{{one_collection(CollectionLabel::D1, padded, k1, k2, 0, 0),
                 one_collection(CollectionLabel::D2, padded, k1, k2, k1, k2),
                 one_collection(CollectionLabel::D3, padded, k1, k2, k1, 0),
                 one_collection(CollectionLabel::D4, padded, k1, k2, 0, k2)},
                padded,
                Shape{n1, n2}};
  return c;
}

std::vector<long long> cbs_allocation(long long m, int s0) {
  if (s0 < 0) throw std::invalid_argument("cbs_allocation: negative level count");
  if (m < 2 * s0)
    throw std::invalid_argument("cbs_allocation: budget " + std::to_string(m) +
                                " below 2 * " + std::to_string(s0));
  std::vector<long long> alloc(s0);
  for (int s = 1; s <= s0; ++s)
    alloc[s - 1] = (m - s0) * s / (1ll << (s + 1)) + 1;
  return alloc;
}

Block cbs_run(const SignalInstance& inst, const BlockCollection& coll, long long m,
              Rng& rng, BudgetLedger& ledger, Transcript* sink) {
  if (!(inst.shape() == coll.shape))
    throw std::invalid_argument("cbs_run: instance shape must match the collection's torus");
  int p = coll.p();
  if (!is_pow2(p)) throw std::invalid_argument("cbs_run: tile count must be a power of two");
  if (p == 1) return coll.tiles[0];
  int s0 = log2_exact(p);
  std::vector<long long> alloc = cbs_allocation(m, s0);

  double cell_count = 4.0 * coll.k1 * coll.k2;  // cells per tile
  int lo = 0, hi = p;
  for (int s = 1; s <= s0; ++s) {
    // Half the surviving tiles get +a, half -a; a is chosen so the pattern
    // has unit energy: 2^(s0-s+1) tiles of u1*u2 cells at a^2 each.
    double a = std::sqrt(std::exp2(-(s0 - s + 1)) / cell_count);
    int mid = (lo + hi) / 2;
    std::vector<std::pair<Block, double>> entries;
    entries.reserve(hi - lo);
    for (int i = lo; i < mid; ++i) entries.emplace_back(coll.tiles[i], a);
    for (int i = mid; i < hi; ++i) entries.emplace_back(coll.tiles[i], -a);
    SensingMatrix x = block_support_sensing(std::move(entries), coll.shape);
    double sum = 0;
    for (long long i = 0; i < alloc[s - 1]; ++i)
      sum += measure(inst, x, rng, ledger, Phase::Cbs, s, sink).y;
    if (sum > 0)
      hi = mid;
    else
      lo = mid;
  }
  return coll.tiles[lo];
}

Region region_from_blocks(const std::vector<Block>& winners, Shape shape) {
  Region region;
  for (const Block& w : winners) {
    for (int t = 0; t < w.height; ++t)
      region.rows.push_back((w.row_start - 1 + t) % shape.n1 + 1);
    for (int t = 0; t < w.width; ++t)
      region.cols.push_back((w.col_start - 1 + t) % shape.n2 + 1);
  }
  std::sort(region.rows.begin(), region.rows.end());
  region.rows.erase(std::unique(region.rows.begin(), region.rows.end()), region.rows.end());
  std::sort(region.cols.begin(), region.cols.end());
  region.cols.erase(std::unique(region.cols.begin(), region.cols.end()), region.cols.end());
  return region;
}

Region approx_localize(const SignalInstance& inst, const Collections& colls,
                       long long m_unit, Rng& rng, BudgetLedger& ledger,
                       Transcript* sink) {
  std::vector<Block> winners;
  winners.reserve(4);
  for (const BlockCollection& coll : colls.d)
    winners.push_back(cbs_run(inst, coll, m_unit, rng, ledger, sink));
  return region_from_blocks(winners, colls.padded);
}

namespace {

// Shared machinery for the column and row versions of the exact stage.
// `axis` holds the collected indices being localized along; `support` the
// collected indices of the other dimension, which every probe senses
// through.
struct AxisView {
  const std::vector<int>& axis;
  const std::vector<int>& support;
  int k;             // signal extent along `axis`
  Phase scan_phase;
  Phase search_phase;
  bool columns;      // probes are columns when true, rows otherwise
};

SensingMatrix probe_matrix(const AxisView& view, const SignalInstance& inst, int actual) {
  return view.columns ? column_sensing(view.support, actual, inst.shape())
                      : row_sensing(view.support, actual, inst.shape());
}

std::vector<int> exact_localize_axis(const SignalInstance& inst, const AxisView& view,
                                     long long m_unit, double delta, ActiveVariant v,
                                     Rng& rng, BudgetLedger& ledger, Transcript* sink) {
  const int w = static_cast<int>(view.axis.size());
  const int k = view.k;
  if (w < 1) throw std::invalid_argument("exact stage: empty region axis");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("exact stage: delta must be in (0,1)");

  // Stage 1: one candidate every k-th collected index; the active run has
  // length exactly k, so exactly one candidate falls inside it.
  int ncand = (w + k - 1) / k;
  long long share;
  if (v == ActiveVariant::Proof) {
    share = 8 * m_unit / ncand;
  } else {
    if (ncand > 4) ncand = 4;
    share = 9 * m_unit / 5;
  }
  if (share < 1) throw budget_error("exact stage: scan share is zero");

  int best = 1;  // virtual index (1-based into view.axis)
  double best_sum = 0;
  for (int j = 0; j < ncand; ++j) {
    int vc = 1 + j * k;
    SensingMatrix x = probe_matrix(view, inst, view.axis[vc - 1]);
    double sum = 0;
    for (long long i = 0; i < share; ++i)
      sum += measure(inst, x, rng, ledger, view.scan_phase, 0, sink).y;
    if (j == 0 || sum > best_sum) {
      best_sum = sum;
      best = vc;
    }
  }

  // Stage 2: the run ends somewhere in [best, best + k); binary search for
  // its right edge, probing one index at a time against a fixed threshold.
  int l = best;
  if (k > 1) {
    long long m_b = v == ActiveVariant::Proof
                        ? static_cast<long long>(m_unit / (3.0 * std::log(k)))
                        : static_cast<long long>(9 * m_unit / (6.0 * std::log2(k)));
    if (m_b < 1) throw budget_error("exact stage: search budget is zero");
    double tau = std::sqrt(2.0 * inst.sigma * inst.sigma * m_b *
                           std::log(3.0 * std::log(k) / delta));
    int r = l + k;
    while (r - l > 1) {
      int c = (l + r) / 2;
      bool active = false;
      if (c <= w) {
        SensingMatrix x = probe_matrix(view, inst, view.axis[c - 1]);
        double sum = 0;
        for (long long i = 0; i < m_b; ++i)
          sum += measure(inst, x, rng, ledger, view.search_phase, 0, sink).y;
        active = sum >= tau;
      }
      // an index past the collected region holds no signal by construction
      if (active)
        l = c;
      else
        r = c;
    }
  }

  int first = l - k + 1 < 1 ? 1 : l - k + 1;
  std::vector<int> out;
  out.reserve(l - first + 1);
  for (int vkept = first; vkept <= l; ++vkept) out.push_back(view.axis[vkept - 1]);
  return out;
}

}  // namespace

std::vector<int> exact_localize_columns(const SignalInstance& inst, const Region& region,
                                        long long m_unit, double delta, ActiveVariant v,
                                        Rng& rng, BudgetLedger& ledger, Transcript* sink) {
  AxisView view{region.cols, region.rows, inst.k2, Phase::ExactColScan,
                Phase::ExactColSearch, true};
  return exact_localize_axis(inst, view, m_unit, delta, v, rng, ledger, sink);
}

std::vector<int> exact_localize_rows(const SignalInstance& inst, const Region& region,
                                     long long m_unit, double delta, ActiveVariant v,
                                     Rng& rng, BudgetLedger& ledger, Transcript* sink) {
  AxisView view{region.rows, region.cols, inst.k1, Phase::ExactRowScan,
                Phase::ExactRowSearch, false};
  return exact_localize_axis(inst, view, m_unit, delta, v, rng, ledger, sink);
}

ActiveResult localize_active(const SignalInstance& inst, long long budget, double delta,
                             Rng& rng, const ActiveOptions& opts) {
  Collections colls = build_collections(inst.n1, inst.n2, inst.k1, inst.k2);
  int s0 = log2_exact(colls.d[0].p());
  double need = 22.0 * std::max(3.0 * std::log(static_cast<double>(inst.n1) * inst.n2),
                                2.0 * s0);
  if (static_cast<double>(budget) < need)
    throw std::invalid_argument("localize_active: budget " + std::to_string(budget) +
                                " below the 22-unit schedule minimum of " +
                                std::to_string(need));
  long long m_unit = budget / 22;

  SignalInstance work = inst;
  if (!(colls.padded == inst.shape())) {
    work.n1 = colls.padded.n1;
    work.n2 = colls.padded.n2;
  }

  BudgetLedger ledger(budget);
  ledger.set_cap(Phase::Cbs, 4 * m_unit);
  ledger.set_cap(Phase::ExactColScan, 8 * m_unit);
  ledger.set_cap(Phase::ExactRowScan, 8 * m_unit);
  long long search_cap = opts.variant == ActiveVariant::Proof ? m_unit : 2 * m_unit;
  ledger.set_cap(Phase::ExactColSearch, search_cap);
  ledger.set_cap(Phase::ExactRowSearch, search_cap);

  double delta_step = delta / 8.0;
  Region region = approx_localize(work, colls, m_unit, rng, ledger, opts.transcript);
  std::vector<int> cols = exact_localize_columns(work, region, m_unit, delta_step,
                                                 opts.variant, rng, ledger, opts.transcript);
  std::vector<int> rows = exact_localize_rows(work, region, m_unit, delta_step,
                                              opts.variant, rng, ledger, opts.transcript);

  auto clamp = [](int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); };
  Block found{clamp(rows.front(), 1, inst.n1 - inst.k1 + 1),
              clamp(cols.front(), 1, inst.n2 - inst.k2 + 1), inst.k1, inst.k2, false};
  return ActiveResult{found, std::move(region), ledger, m_unit};
}

}  // namespace blocksense
