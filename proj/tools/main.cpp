// Command line front end: detection risk tables, one-shot localization runs,
// theory bound evaluation, and Monte Carlo sweeps driven by a config file.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blocksense/bounds.hpp"
#include "blocksense/detect.hpp"
#include "blocksense/errors.hpp"
#include "blocksense/harness.hpp"
#include "blocksense/loc_active.hpp"
#include "blocksense/loc_passive.hpp"

using namespace blocksense;

namespace {

void warn_wide_block(int n1, int n2, int k1, int k2) {
  if (2 * k1 > n1 || 2 * k2 > n2)
    std::fprintf(stderr,
                 "warning: block spans more than half the matrix; the shifted "
                 "tilings overlap it in several tiles and the asymptotic "
                 "guarantees degrade\n");
}

struct CommonDims {
  int n1 = 16, n2 = 16, k1 = 4, k2 = 4;
  double sigma = 1.0;
  std::uint64_t seed = 1;
};

void add_dims(CLI::App* cmd, CommonDims& d) {
  cmd->add_option("--n1", d.n1, "matrix rows");
  cmd->add_option("--n2", d.n2, "matrix columns");
  cmd->add_option("--k1", d.k1, "block rows");
  cmd->add_option("--k2", d.k2, "block columns");
  cmd->add_option("--sigma", d.sigma, "noise level");
  cmd->add_option("--seed", d.seed, "rng seed");
}

int run_detect(const CommonDims& d, long long m, double alpha,
               const std::vector<double>& mus, long long trials) {
  warn_wide_block(d.n1, d.n2, d.k1, d.k2);
  DetectParams params{d.n1, d.n2, d.k1, d.k2, d.sigma, m, alpha};
  std::vector<DetectRiskRow> rows =
      estimate_detection_risk(params, mus, trials, RngHandle{d.seed, 0});
  std::printf("threshold %.6g, %lld trials per row\n",
              detection_threshold(m, d.sigma, alpha), trials);
  std::printf("%12s %12s %12s %12s %12s\n", "mu", "type_one", "type_two", "risk",
              "stderr");
  for (const DetectRiskRow& r : rows)
    std::printf("%12.6g %12.4f %12.4f %12.4f %12.4f\n", r.mu, r.type_one, r.type_two,
                r.risk, r.stderr_risk);
  return 0;
}

int run_loc_passive(const CommonDims& d, double mu, long long m, int row, int col) {
  warn_wide_block(d.n1, d.n2, d.k1, d.k2);
  Rng rng(RngHandle{d.seed, 0});
  SignalInstance inst =
      row > 0 && col > 0
          ? make_instance(d.n1, d.n2, d.k1, d.k2, mu, d.sigma,
                          Block{row, col, d.k1, d.k2})
          : sample_instance(d.n1, d.n2, d.k1, d.k2, mu, d.sigma, rng);
  PassiveResult res = localize_passive(inst, m, rng);
  std::printf("true block      (%d, %d)\n", inst.b_star.row_start, inst.b_star.col_start);
  std::printf("recovered block (%d, %d)%s\n", res.block.row_start, res.block.col_start,
              res.block == inst.b_star ? "  [exact]" : "");
  std::printf("amplitude estimate %.6g (true %.6g)\n", res.table.mu_hat(res.block), mu);
  return 0;
}

int run_loc_active(const CommonDims& d, double mu, long long budget, double delta,
                   const std::string& variant, int row, int col,
                   const std::string& transcript_path) {
  warn_wide_block(d.n1, d.n2, d.k1, d.k2);
  Rng rng(RngHandle{d.seed, 0});
  SignalInstance inst =
      row > 0 && col > 0
          ? make_instance(d.n1, d.n2, d.k1, d.k2, mu, d.sigma,
                          Block{row, col, d.k1, d.k2})
          : sample_instance(d.n1, d.n2, d.k1, d.k2, mu, d.sigma, rng);
  ActiveOptions opts;
  opts.variant = variant_from_name(variant);
  Transcript transcript;
  if (!transcript_path.empty()) opts.transcript = &transcript;
  ActiveResult res = localize_active(inst, budget, delta, rng, opts);
  std::printf("true block      (%d, %d)\n", inst.b_star.row_start, inst.b_star.col_start);
  std::printf("recovered block (%d, %d)%s\n", res.block.row_start, res.block.col_start,
              res.block == inst.b_star ? "  [exact]" : "");
  std::printf("region %zu rows x %zu cols, unit budget %lld\n", res.region.rows.size(),
              res.region.cols.size(), res.m_unit);
  std::printf("measurements spent %lld of %lld\n", res.ledger.total_spent(),
              res.ledger.total_allowed());
  if (!transcript_path.empty()) {
    std::ofstream out(transcript_path, std::ios::binary);
    if (!out) throw io_error(transcript_path, "cannot open for writing");
    out << transcript_to_jsonl(transcript);
    if (!out) throw io_error(transcript_path, "write failed");
    std::printf("transcript: %zu measurements -> %s\n", transcript.size(),
                transcript_path.c_str());
  }
  return 0;
}

int run_bounds(const std::string& which, BoundQuery q, double C, double C1, double C2,
               const std::vector<long long>& grid) {
  auto eval = [&](const BoundQuery& query) -> BoundResult {
    if (which == "det-lb") return detection_lb(query);
    if (which == "det-ub") return detection_ub(query);
    if (which == "ploc-lb") return passive_loc_lb(query, C);
    if (which == "ploc-ub") return passive_loc_ub(query, C1, C2);
    if (which == "aloc-lb") return active_loc_lb(query);
    if (which == "aloc-ub") return active_loc_ub(query);
    if (which == "bic-ub") return bicluster_passive_ub(query, C1);
    if (which == "bic-lb") return bicluster_passive_lb(query, C2);
    throw std::invalid_argument("unknown bound '" + which + "'");
  };
  auto show = [&](const BoundResult& r) {
    std::printf("%s", format_double(r.value).c_str());
    if (r.infinite) std::printf("  [no finite threshold at these dimensions]");
    if (r.first_branch_dropped) std::printf("  [first branch vacuous, dropped]");
    if (!r.side_condition_met) std::printf("  [side condition on m not met]");
    std::printf("\n");
  };
  if (grid.empty()) {
    show(eval(q));
    return 0;
  }
  for (long long m : grid) {
    BoundQuery query = q;
    query.m = m;
    std::printf("m=%-10lld ", m);
    show(eval(query));
  }
  return 0;
}

int run_sweep_cmd(const SweepSpec& spec, const std::string& out_csv,
                  const std::string& out_svg) {
  SweepResult result = run_sweep(spec);
  if (out_csv.empty()) {
    std::fputs(sweep_csv(result).c_str(), stdout);
  } else {
    emit_csv(result, out_csv);
    std::printf("csv: %zu rows -> %s\n", result.rows.size(), out_csv.c_str());
  }
  if (!out_svg.empty()) {
    emit_svg(result, out_svg);
    std::printf("svg -> %s\n", out_svg.c_str());
  }
  std::vector<std::optional<double>> xs = crossings(result);
  for (std::size_t ci = 0; ci < xs.size(); ++ci) {
    const CurveSpec& c = spec.curves[ci];
    if (xs[ci])
      std::fprintf(stderr, "curve %dx%d k=%dx%d reaches 0.95 at rescaled snr %.4g\n",
                   c.n1, c.n2, c.k1, c.k2, *xs[ci]);
    else
      std::fprintf(stderr, "curve %dx%d k=%dx%d never reaches 0.95 on this grid\n", c.n1,
                   c.n2, c.k1, c.k2);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressive block detection and localization toolkit"};
  app.require_subcommand(1);

  CommonDims det_d;
  long long det_m = 100, det_trials = 1000;
  double det_alpha = 0.05;
  std::vector<double> det_mus;
  CLI::App* det = app.add_subcommand("detect", "risk table for the summed-output test");
  add_dims(det, det_d);
  det->add_option("-m,--measurements", det_m, "measurements per trial");
  det->add_option("--alpha", det_alpha, "test level");
  det->add_option("--mu", det_mus, "signal amplitudes to probe (repeatable)")
      ->required();
  det->add_option("--trials", det_trials, "monte carlo trials per amplitude");

  CommonDims lp_d;
  double lp_mu = 1.0;
  long long lp_m = 100;
  int lp_row = 0, lp_col = 0;
  CLI::App* lp = app.add_subcommand("localize-passive",
                                    "least-squares localization from a fixed batch");
  add_dims(lp, lp_d);
  lp->add_option("--mu", lp_mu, "signal amplitude");
  lp->add_option("-m,--measurements", lp_m, "number of measurements");
  lp->add_option("--row", lp_row, "block top row (omit to sample uniformly)");
  lp->add_option("--col", lp_col, "block left column (omit to sample uniformly)");

  CommonDims la_d;
  double la_mu = 1.0, la_delta = 0.1;
  long long la_budget = 11000;
  int la_row = 0, la_col = 0;
  std::string la_variant = "proof", la_transcript;
  CLI::App* la =
      app.add_subcommand("localize-active", "adaptive localization on a budget");
  add_dims(la, la_d);
  la->add_option("--mu", la_mu, "signal amplitude");
  la->add_option("--budget", la_budget, "total measurement budget");
  la->add_option("--delta", la_delta, "failure allowance");
  la->add_option("--variant", la_variant, "search parameterization: proof or box");
  la->add_option("--row", la_row, "block top row (omit to sample uniformly)");
  la->add_option("--col", la_col, "block left column (omit to sample uniformly)");
  la->add_option("--transcript", la_transcript, "write measurement log (jsonl)");

  std::string b_which;
  BoundQuery bq;
  bq.n1 = bq.n2 = 16;
  bq.k1 = bq.k2 = 4;
  bq.m = 100;
  double b_C = 1.0, b_C1 = 1.0, b_C2 = 1.0;
  std::vector<long long> b_grid;
  CLI::App* bo = app.add_subcommand("bounds", "evaluate a theory threshold");
  bo->add_option("--which", b_which, "det-lb det-ub ploc-lb ploc-ub aloc-lb aloc-ub bic-ub bic-lb")
      ->required();
  bo->add_option("--n1", bq.n1, "matrix rows");
  bo->add_option("--n2", bq.n2, "matrix columns");
  bo->add_option("--k1", bq.k1, "block rows");
  bo->add_option("--k2", bq.k2, "block columns");
  bo->add_option("-m,--measurements", bq.m, "measurement budget");
  bo->add_option("--sigma", bq.sigma, "noise level");
  bo->add_option("--risk", bq.risk, "target failure probability");
  bo->add_option("--const-c", b_C, "leading constant (lower bounds)");
  bo->add_option("--const-c1", b_C1, "side-condition constant");
  bo->add_option("--const-c2", b_C2, "leading constant (upper bounds)");
  bo->add_option("--grid", b_grid, "evaluate at these m values instead");

  std::string sw_config, sw_out_csv, sw_out_svg;
  std::string sw_mode, sw_rescale, sw_variant, sw_axis;
  std::vector<std::string> sw_curves;
  std::vector<double> sw_snr;
  long long sw_m = 0, sw_budget = 0, sw_trials = 0;
  double sw_sigma = 0, sw_alpha = 0, sw_delta = 0;
  std::uint64_t sw_seed = 0;
  int sw_threads = 0;
  CLI::App* sw = app.add_subcommand("sweep", "success-rate curves over an snr grid");
  sw->add_option("--config", sw_config, "key = value config file");
  CLI::Option* o_mode = sw->add_option("--mode", sw_mode, "detect, passive, or active");
  CLI::Option* o_curves =
      sw->add_option("--curves", sw_curves, "problem sizes, n:k or n1:n2:k1:k2");
  CLI::Option* o_m = sw->add_option("-m,--measurements", sw_m, "measurements per trial");
  CLI::Option* o_budget = sw->add_option("--budget", sw_budget, "active total budget");
  CLI::Option* o_sigma = sw->add_option("--sigma", sw_sigma, "noise level");
  CLI::Option* o_snr = sw->add_option("--snr", sw_snr, "snr grid");
  CLI::Option* o_axis = sw->add_option("--snr-axis", sw_axis, "raw or rescaled");
  CLI::Option* o_trials = sw->add_option("--trials", sw_trials, "trials per point");
  CLI::Option* o_seed = sw->add_option("--seed", sw_seed, "rng seed");
  CLI::Option* o_alpha = sw->add_option("--alpha", sw_alpha, "detection level");
  CLI::Option* o_delta = sw->add_option("--delta", sw_delta, "failure allowance");
  CLI::Option* o_rescale = sw->add_option("--rescale", sw_rescale, "abscissa rule");
  CLI::Option* o_threads = sw->add_option("--threads", sw_threads, "worker threads");
  CLI::Option* o_variant = sw->add_option("--variant", sw_variant, "proof or box");
  sw->add_option("--out-csv", sw_out_csv, "write rows here instead of stdout");
  sw->add_option("--out-svg", sw_out_svg, "also draw the curves");

  try {
    app.parse(argc, argv);

    if (*det) return run_detect(det_d, det_m, det_alpha, det_mus, det_trials);
    if (*lp) return run_loc_passive(lp_d, lp_mu, lp_m, lp_row, lp_col);
    if (*la)
      return run_loc_active(la_d, la_mu, la_budget, la_delta, la_variant, la_row, la_col,
                            la_transcript);
    if (*bo) return run_bounds(b_which, bq, b_C, b_C1, b_C2, b_grid);
    if (*sw) {
      SweepSpec spec = sw_config.empty() ? SweepSpec{} : load_config(sw_config);
      if (o_mode->count()) spec.mode = mode_from_name(sw_mode);
      if (o_curves->count()) {
        spec.curves.clear();
        for (const std::string& item : sw_curves) {
          SweepSpec one = parse_config("curves = " + item);
          spec.curves.insert(spec.curves.end(), one.curves.begin(), one.curves.end());
        }
      }
      if (o_m->count()) spec.m = sw_m;
      if (o_budget->count()) spec.budget = sw_budget;
      if (o_sigma->count()) spec.sigma = sw_sigma;
      if (o_snr->count()) spec.snr = sw_snr;
      if (o_axis->count()) spec.snr_is_rescaled = sw_axis == "rescaled";
      if (o_trials->count()) spec.trials = sw_trials;
      if (o_seed->count()) spec.seed = sw_seed;
      if (o_alpha->count()) spec.alpha = sw_alpha;
      if (o_delta->count()) spec.delta = sw_delta;
      if (o_rescale->count()) spec.rescale = rule_from_name(sw_rescale);
      if (o_threads->count()) spec.threads = sw_threads;
      if (o_variant->count()) spec.variant = variant_from_name(sw_variant);
      for (const CurveSpec& c : spec.curves) warn_wide_block(c.n1, c.n2, c.k1, c.k2);
      return run_sweep_cmd(spec, sw_out_csv, sw_out_svg);
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const budget_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
