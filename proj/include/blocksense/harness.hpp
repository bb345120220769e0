#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blocksense/bounds.hpp"
#include "blocksense/loc_active.hpp"

namespace blocksense {

enum class SweepMode { Detect, Passive, Active };

// How the abscissa is collapsed across problem sizes.  Auto picks by mode:
// detection and passive use their respective rules; active uses the small-k
// rule unless k is a constant fraction of n (>= n/4 on both axes).
enum class RescaleRule { Auto, Detect, Passive, ActiveSmallK, ActiveLargeK };

struct CurveSpec {
  int n1 = 0, n2 = 0, k1 = 0, k2 = 0;
  bool operator==(const CurveSpec&) const = default;
};

struct SweepSpec {
  SweepMode mode = SweepMode::Passive;
  std::vector<CurveSpec> curves;
  long long m = 100;         // measurements per trial (detect & passive modes)
  long long budget = 11000;  // total measurements per trial (active mode)
  double sigma = 1.0;
  std::vector<double> snr;   // ascending grid
  bool snr_is_rescaled = false;  // grid given on the collapsed axis
  long long trials = 200;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  double delta = 0.1;
  RescaleRule rescale = RescaleRule::Auto;
  int threads = 1;
  ActiveVariant variant = ActiveVariant::Proof;
};

struct SweepRow {
  SweepMode mode = SweepMode::Passive;
  CurveSpec curve;
  long long m = 0;  // measurements per trial (total budget in active mode)
  double sigma = 1.0;
  double snr = 0.0;
  double snr_rescaled = 0.0;
  long long successes = 0;
  long long trials = 0;
  double phat = 0.0;
  double stderr_phat = 0.0;
  double theory_lb = 0.0;
  double theory_ub = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepRow> rows;  // grouped by curve, grid order within a curve
};

// Multiplier taking a raw SNR to the collapsed abscissa.  For active modes m
// is the per-unit count (budget / 22), not the total.
double rescale_factor(SweepMode mode, RescaleRule rule, const CurveSpec& c, long long m);

double rescale_snr(SweepMode mode, RescaleRule rule, const CurveSpec& c, long long m,
                   double snr);

// Runs the full grid.  Every trial draws from its own stream derived from
// (seed, curve, grid point, trial), so the result is identical for any
// thread count.  Detection trials alternate a null and a signal instance by
// trial parity; localization trials count exact block recovery.
SweepResult run_sweep(const SweepSpec& spec);

std::string sweep_csv(const SweepResult& result);
std::vector<SweepRow> parse_sweep_csv(const std::string& csv);
void emit_csv(const SweepResult& result, const std::string& path);

// Success-probability-vs-abscissa plot, one polyline per curve, with a
// dashed rule at the first curve's 0.95 crossing.  Self-contained SVG.
void emit_svg(const SweepResult& result, const std::string& path);

// Smallest grid abscissa whose success estimate reaches `level`, per curve.
std::vector<std::optional<double>> crossings(const SweepResult& result,
                                             double level = 0.95);

// Flat `key = value` file, UTF-8, `#` starts a comment.  Unknown keys and
// malformed values throw std::invalid_argument with the offending line.
SweepSpec parse_config(const std::string& text);
SweepSpec load_config(const std::string& path);

std::string mode_name(SweepMode mode);
SweepMode mode_from_name(const std::string& name);
std::string rule_name(RescaleRule rule);
RescaleRule rule_from_name(const std::string& name);
std::string variant_name(ActiveVariant v);
ActiveVariant variant_from_name(const std::string& name);

// Shortest decimal form that parses back to the same double (to_chars).
std::string format_double(double v);

}  // namespace blocksense
