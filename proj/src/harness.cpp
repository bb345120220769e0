#include "blocksense/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blocksense/detect.hpp"
#include "blocksense/errors.hpp"
#include "blocksense/loc_passive.hpp"
#include "blocksense/parallel.hpp"

namespace blocksense {

namespace {

constexpr const char* kCsvHeader =
    "mode,n1,n2,k1,k2,m,sigma,snr,snr_rescaled,successes,trials,phat,stderr,"
    "theory_lb,theory_ub";

RescaleRule resolve_rule(SweepMode mode, RescaleRule rule, const CurveSpec& c) {
  if (rule != RescaleRule::Auto) return rule;
  switch (mode) {
    case SweepMode::Detect:
      return RescaleRule::Detect;
    case SweepMode::Passive:
      return RescaleRule::Passive;
    case SweepMode::Active:
      // Treat the block as "large" once it spans a quarter of each axis.
      if (4 * c.k1 >= c.n1 && 4 * c.k2 >= c.n2) return RescaleRule::ActiveLargeK;
      return RescaleRule::ActiveSmallK;
  }
  return RescaleRule::Passive;
}

void check_curve(const CurveSpec& c) {
  if (c.n1 < 1 || c.n2 < 1 || c.k1 < 1 || c.k2 < 1 || c.k1 > c.n1 || c.k2 > c.n2)
    throw std::invalid_argument("curve dimensions must satisfy 1 <= k <= n");
}

}  // namespace

double rescale_factor(SweepMode mode, RescaleRule rule, const CurveSpec& c, long long m) {
  check_curve(c);
  if (m < 1) throw std::invalid_argument("rescale_factor: m must be positive");
  const double cells = static_cast<double>(c.n1) * c.n2;
  const double kmin = std::min(c.k1, c.k2);
  const double kmax = std::max(c.k1, c.k2);
  const double md = static_cast<double>(m);
  switch (resolve_rule(mode, rule, c)) {
    case RescaleRule::Detect:
      return std::sqrt(md) * c.k1 * c.k2 / std::sqrt(cells);
    case RescaleRule::Passive:
      return std::sqrt(md * kmin) / std::sqrt(cells);
    case RescaleRule::ActiveSmallK:
      return std::sqrt(md) * c.k1 * c.k2 / std::sqrt(cells);
    case RescaleRule::ActiveLargeK:
      return std::sqrt(md * kmin / std::max(std::log(kmax), 1.0));
    case RescaleRule::Auto:
      break;
  }
  throw std::logic_error("unresolved rescale rule");
}

double rescale_snr(SweepMode mode, RescaleRule rule, const CurveSpec& c, long long m,
                   double snr) {
  return snr * rescale_factor(mode, rule, c, m);
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.curves.empty()) throw std::invalid_argument("sweep needs at least one curve");
  if (spec.snr.empty()) throw std::invalid_argument("sweep needs a non-empty snr grid");
  if (spec.trials < 1) throw std::invalid_argument("trials must be positive");
  if (spec.threads < 1) throw std::invalid_argument("threads must be positive");
  if (!(spec.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(spec.delta > 0.0 && spec.delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  for (const CurveSpec& c : spec.curves) check_curve(c);
  const bool active = spec.mode == SweepMode::Active;
  if (active) {
    if (spec.budget < 22) throw std::invalid_argument("active budget must be at least 22");
  } else if (spec.m < 1) {
    throw std::invalid_argument("m must be positive");
  }

  const long long m_col = active ? spec.budget : spec.m;
  const long long m_axis = active ? spec.budget / 22 : spec.m;
  const RngHandle base{spec.seed, 0};

  SweepResult result;
  result.spec = spec;
  for (std::size_t ci = 0; ci < spec.curves.size(); ++ci) {
    const CurveSpec c = spec.curves[ci];
    const double factor = rescale_factor(spec.mode, spec.rescale, c, m_axis);

    BoundQuery q;
    q.n1 = c.n1;
    q.n2 = c.n2;
    q.k1 = c.k1;
    q.k2 = c.k2;
    q.m = m_col;
    q.sigma = 1.0;  // theory columns are in SNR units
    q.risk = spec.mode == SweepMode::Detect ? spec.alpha : spec.delta;
    BoundResult lb, ub;
    switch (spec.mode) {
      case SweepMode::Detect:
        lb = detection_lb(q);
        ub = detection_ub(q);
        break;
      case SweepMode::Passive:
        lb = passive_loc_lb(q);
        ub = passive_loc_ub(q);
        break;
      case SweepMode::Active:
        lb = active_loc_lb(q);
        ub = active_loc_ub(q);
        break;
    }

    for (std::size_t gi = 0; gi < spec.snr.size(); ++gi) {
      const double snr = spec.snr_is_rescaled ? spec.snr[gi] / factor : spec.snr[gi];
      const double mu = snr * spec.sigma;
      const RngHandle point = base.derive(ci, gi);

      std::vector<char> wins(static_cast<std::size_t>(spec.trials), 0);
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(spec.trials));
      parallel_for(spec.trials, spec.threads, [&](long long t) {
        try {
          Rng rng(point.derive(static_cast<std::uint64_t>(t)));
          bool win = false;
          switch (spec.mode) {
            case SweepMode::Detect: {
              if (t % 2 == 0) {
                SignalInstance inst = make_instance(c.n1, c.n2, c.k1, c.k2, 0.0,
                                                    spec.sigma, Block{1, 1, c.k1, c.k2});
                win = !run_detection(inst, spec.m, spec.alpha, rng).reject;
              } else {
                SignalInstance inst =
                    sample_instance(c.n1, c.n2, c.k1, c.k2, mu, spec.sigma, rng);
                win = run_detection(inst, spec.m, spec.alpha, rng).reject;
              }
              break;
            }
            case SweepMode::Passive: {
              SignalInstance inst =
                  sample_instance(c.n1, c.n2, c.k1, c.k2, mu, spec.sigma, rng);
              win = localize_passive(inst, spec.m, rng).block == inst.b_star;
              break;
            }
            case SweepMode::Active: {
              SignalInstance inst =
                  sample_instance(c.n1, c.n2, c.k1, c.k2, mu, spec.sigma, rng);
              ActiveOptions opts;
              opts.variant = spec.variant;
              win = localize_active(inst, spec.budget, spec.delta, rng, opts).block ==
                    inst.b_star;
              break;
            }
          }
          wins[static_cast<std::size_t>(t)] = win ? 1 : 0;
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
      for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);

      SweepRow row;
      row.mode = spec.mode;
      row.curve = c;
      row.m = m_col;
      row.sigma = spec.sigma;
      row.snr = snr;
      row.snr_rescaled = snr * factor;
      row.successes = std::count(wins.begin(), wins.end(), 1);
      row.trials = spec.trials;
      row.phat = static_cast<double>(row.successes) / static_cast<double>(row.trials);
      row.stderr_phat =
          std::sqrt(row.phat * (1.0 - row.phat) / static_cast<double>(row.trials));
      row.theory_lb = lb.value;
      row.theory_ub = ub.value;
      result.rows.push_back(row);
    }
  }
  return result;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string sweep_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const SweepRow& r : result.rows) {
    out += mode_name(r.mode);
    out += ',';
    out += std::to_string(r.curve.n1);
    out += ',';
    out += std::to_string(r.curve.n2);
    out += ',';
    out += std::to_string(r.curve.k1);
    out += ',';
    out += std::to_string(r.curve.k2);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += format_double(r.sigma);
    out += ',';
    out += format_double(r.snr);
    out += ',';
    out += format_double(r.snr_rescaled);
    out += ',';
    out += std::to_string(r.successes);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    out += format_double(r.phat);
    out += ',';
    out += format_double(r.stderr_phat);
    out += ',';
    out += format_double(r.theory_lb);
    out += ',';
    out += format_double(r.theory_ub);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long long parse_ll(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

double parse_d(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(const std::string& csv) {
  std::vector<std::string> lines = split(csv, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || trim(lines.front()) != kCsvHeader)
    throw std::invalid_argument("csv is missing the expected header line");
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = split(trim(lines[i]), ',');
    if (f.size() != 15)
      throw std::invalid_argument("csv row " + std::to_string(i) + " has " +
                                  std::to_string(f.size()) + " fields, expected 15");
    SweepRow r;
    r.mode = mode_from_name(f[0]);
    r.curve.n1 = static_cast<int>(parse_ll(f[1]));
    r.curve.n2 = static_cast<int>(parse_ll(f[2]));
    r.curve.k1 = static_cast<int>(parse_ll(f[3]));
    r.curve.k2 = static_cast<int>(parse_ll(f[4]));
    r.m = parse_ll(f[5]);
    r.sigma = parse_d(f[6]);
    r.snr = parse_d(f[7]);
    r.snr_rescaled = parse_d(f[8]);
    r.successes = parse_ll(f[9]);
    r.trials = parse_ll(f[10]);
    r.phat = parse_d(f[11]);
    r.stderr_phat = parse_d(f[12]);
    r.theory_lb = parse_d(f[13]);
    r.theory_ub = parse_d(f[14]);
    rows.push_back(r);
  }
  return rows;
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path, "cannot open for writing");
  out << sweep_csv(result);
  if (!out) throw io_error(path, "write failed");
}

std::vector<std::optional<double>> crossings(const SweepResult& result, double level) {
  std::vector<std::optional<double>> xs(result.spec.curves.size());
  const std::size_t per_curve = result.spec.snr.size();
  for (std::size_t ci = 0; ci < result.spec.curves.size(); ++ci) {
    for (std::size_t gi = 0; gi < per_curve; ++gi) {
      const SweepRow& r = result.rows[ci * per_curve + gi];
      if (r.phat >= level) {
        xs[ci] = r.snr_rescaled;
        break;
      }
    }
  }
  return xs;
}

std::string mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::Detect:
      return "detect";
    case SweepMode::Passive:
      return "passive";
    case SweepMode::Active:
      return "active";
  }
  return "?";
}

SweepMode mode_from_name(const std::string& name) {
  if (name == "detect") return SweepMode::Detect;
  if (name == "passive") return SweepMode::Passive;
  if (name == "active") return SweepMode::Active;
  throw std::invalid_argument("unknown mode '" + name + "'");
}

std::string rule_name(RescaleRule rule) {
  switch (rule) {
    case RescaleRule::Auto:
      return "auto";
    case RescaleRule::Detect:
      return "detect";
    case RescaleRule::Passive:
      return "passive";
    case RescaleRule::ActiveSmallK:
      return "active-small";
    case RescaleRule::ActiveLargeK:
      return "active-large";
  }
  return "?";
}

RescaleRule rule_from_name(const std::string& name) {
  if (name == "auto") return RescaleRule::Auto;
  if (name == "detect") return RescaleRule::Detect;
  if (name == "passive") return RescaleRule::Passive;
  if (name == "active-small") return RescaleRule::ActiveSmallK;
  if (name == "active-large") return RescaleRule::ActiveLargeK;
  throw std::invalid_argument("unknown rescale rule '" + name + "'");
}

std::string variant_name(ActiveVariant v) {
  return v == ActiveVariant::Proof ? "proof" : "box";
}

ActiveVariant variant_from_name(const std::string& name) {
  if (name == "proof") return ActiveVariant::Proof;
  if (name == "box") return ActiveVariant::Box;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

namespace {

std::vector<std::string> list_items(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

CurveSpec parse_curve(const std::string& item) {
  std::vector<std::string> f = split(item, ':');
  CurveSpec c;
  if (f.size() == 2) {
    c.n1 = c.n2 = static_cast<int>(parse_ll(f[0]));
    c.k1 = c.k2 = static_cast<int>(parse_ll(f[1]));
  } else if (f.size() == 4) {
    c.n1 = static_cast<int>(parse_ll(f[0]));
    c.n2 = static_cast<int>(parse_ll(f[1]));
    c.k1 = static_cast<int>(parse_ll(f[2]));
    c.k2 = static_cast<int>(parse_ll(f[3]));
  } else {
    throw std::invalid_argument("curve '" + item + "' must be n:k or n1:n2:k1:k2");
  }
  return c;
}

}  // namespace

SweepSpec parse_config(const std::string& text) {
  SweepSpec spec;
  std::string body = text;
  if (body.size() >= 3 && body.compare(0, 3, "\xef\xbb\xbf") == 0) body.erase(0, 3);
  for (std::string& line : split(body, '\n')) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line is not 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "mode") {
      spec.mode = mode_from_name(value);
    } else if (key == "curves") {
      spec.curves.clear();
      for (const std::string& item : list_items(value))
        spec.curves.push_back(parse_curve(item));
    } else if (key == "m") {
      spec.m = parse_ll(value);
    } else if (key == "budget") {
      spec.budget = parse_ll(value);
    } else if (key == "sigma") {
      spec.sigma = parse_d(value);
    } else if (key == "snr") {
      spec.snr.clear();
      for (const std::string& item : list_items(value)) spec.snr.push_back(parse_d(item));
    } else if (key == "snr_axis") {
      if (value == "raw")
        spec.snr_is_rescaled = false;
      else if (value == "rescaled")
        spec.snr_is_rescaled = true;
      else
        throw std::invalid_argument("snr_axis must be raw or rescaled, got '" + value + "'");
    } else if (key == "trials") {
      spec.trials = parse_ll(value);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_ll(value));
    } else if (key == "alpha") {
      spec.alpha = parse_d(value);
    } else if (key == "delta") {
      spec.delta = parse_d(value);
    } else if (key == "rescale") {
      spec.rescale = rule_from_name(value);
    } else if (key == "threads") {
      spec.threads = static_cast<int>(parse_ll(value));
    } else if (key == "variant") {
      spec.variant = variant_from_name(value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return spec;
}

SweepSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace blocksense
