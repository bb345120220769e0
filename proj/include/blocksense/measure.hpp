#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "blocksense/core.hpp"
#include "blocksense/errors.hpp"
#include "blocksense/rng.hpp"

namespace blocksense {

// Which stage of the pipeline asked for a measurement.  The ledger accounts
// per phase; the adaptive localizer keys its schedule off these.
enum class Phase {
  Detection,
  Passive,
  Cbs,
  ExactColScan,
  ExactColSearch,
  ExactRowScan,
  ExactRowSearch,
};
inline constexpr int kNumPhases = 7;

// Tag string used in exported transcripts ("cbs-level-3", "exact-col", ...).
std::string phase_tag(Phase p, int cbs_level = 0);

// A sensing matrix X with ||X||_F = 1 (structured constructors) or
// E||X||_F^2 = 1 (gaussian ensemble).  Stored in whichever structured form
// the constructor implies so that inner products against a block signal cost
// far less than n1*n2 work.  Copies are cheap; bulk payloads are shared.
class SensingMatrix {
 public:
  struct Dense {
    std::shared_ptr<const std::vector<double>> data;  // row-major n1*n2
  };
  struct UniformConst {
    double value;
  };
  // Disjoint blocks, each filled with a single value (the halving stage's
  // +/- patterns).  Constructors must not pass overlapping blocks.
  struct BlockSupport {
    std::shared_ptr<const std::vector<std::pair<Block, double>>> entries;
  };
  struct ColSupport {
    std::shared_ptr<const std::vector<int>> rows;  // sorted, 1-based
    int col;
    double value;
  };
  struct RowSupport {
    std::shared_ptr<const std::vector<int>> cols;  // sorted, 1-based
    int row;
    double value;
  };
  using Rep = std::variant<Dense, UniformConst, BlockSupport, ColSupport, RowSupport>;

  SensingMatrix(Shape shape, Rep rep);

  Shape shape() const { return shape_; }
  const Rep& rep() const { return rep_; }
  // Frobenius norm, computed once at construction from the representation.
  double frobenius_norm() const { return frob_; }
  bool is_dense() const { return std::holds_alternative<Dense>(rep_); }

  double entry(int i, int j) const;       // 1-based; intended for tests/oracles
  std::vector<double> to_dense() const;   // row-major copy

  // Short JSON-able description (kind, shape, scalar parameters; no payload).
  std::string descriptor() const;

 private:
  Shape shape_;
  double frob_;
  Rep rep_;
};

// Entries i.i.d. N(0, 1/(n1*n2)): unit sensing energy in expectation.
SensingMatrix gaussian_sensing(int n1, int n2, Rng& rng);

// Constant (n1*n2)^{-1/2} everywhere; the one matrix the sum test needs.
SensingMatrix allones_sensing(int n1, int n2);

// |rows|^{-1/2} on the given rows of column `col`, zero elsewhere.
SensingMatrix column_sensing(const std::vector<int>& rows, int col, Shape shape);

// |cols|^{-1/2} on the given columns of row `row`, zero elsewhere.
SensingMatrix row_sensing(const std::vector<int>& cols, int row, Shape shape);

// A signed indicator pattern over pairwise-disjoint blocks.
SensingMatrix block_support_sensing(std::vector<std::pair<Block, double>> entries,
                                    Shape shape);

// tr(A' X) where A is the instance's signal matrix.  Exploits structure:
// O(k1*k2) for dense X, O(1) for uniform / column / row support, and
// O(#support blocks) for block support.
double trace_inner(const SignalInstance& inst, const SensingMatrix& x);

struct MeasurementRecord {
  double y = 0.0;
  SensingMatrix x;
  Phase phase = Phase::Detection;
  int cbs_level = 0;  // meaningful only for Phase::Cbs
};

using Transcript = std::vector<MeasurementRecord>;

// Newline-delimited JSON, one measurement per line.  Debug aid only; the
// format is not a stability guarantee.
std::string transcript_to_jsonl(const Transcript& t);

// Tracks measurements spent against a total allowance and optional per-phase
// caps.  Overspending throws budget_error before the measurement is taken;
// nothing is ever silently truncated.
class BudgetLedger {
 public:
  explicit BudgetLedger(long long total_allowed);

  void set_cap(Phase p, long long cap);
  long long cap(Phase p) const { return caps_[idx(p)]; }

  void charge(Phase p, long long count = 1);

  long long total_allowed() const { return total_allowed_; }
  long long total_spent() const { return total_spent_; }
  long long remaining() const { return total_allowed_ - total_spent_; }
  long long spent(Phase p) const { return spent_[idx(p)]; }

  // Largest |1 - ||X||_F| seen across structured measurements, for audits.
  double max_energy_deviation() const { return max_energy_dev_; }
  void note_energy_deviation(double dev);

 private:
  static int idx(Phase p) { return static_cast<int>(p); }
  long long total_allowed_;
  long long total_spent_ = 0;
  std::array<long long, kNumPhases> spent_{};
  std::array<long long, kNumPhases> caps_{};  // 0 = uncapped
  double max_energy_dev_ = 0.0;
};

// One noisy observation y = tr(A' X) + sigma * z, z ~ N(0,1).  Charges the
// ledger first and appends to `sink` when given.
MeasurementRecord measure(const SignalInstance& inst, const SensingMatrix& x,
                          Rng& rng, BudgetLedger& ledger, Phase phase,
                          int cbs_level = 0, Transcript* sink = nullptr);

}  // namespace blocksense
