#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "blocksense/errors.hpp"
#include "blocksense/harness.hpp"

namespace blocksense {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 24, kTop = 30, kBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

void emit_svg(const SweepResult& result, const std::string& path) {
  if (result.rows.empty()) throw std::invalid_argument("nothing to plot");

  double xmin = result.rows.front().snr_rescaled, xmax = xmin;
  for (const SweepRow& r : result.rows) {
    xmin = std::min(xmin, r.snr_rescaled);
    xmax = std::max(xmax, r.snr_rescaled);
  }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double p) { return kTop + (1.0 - p) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";

  // Frame and ticks.
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double p = 0.25 * i;
    svg << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(py(p)) << "\" x2=\""
        << num(kLeft) << "\" y2=\"" << num(py(p)) << "\" stroke=\"#999\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(p) + 4)
        << "\" text-anchor=\"end\">" << label(p) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    double x = xmin + (xmax - xmin) * i / 5.0;
    svg << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
        << num(px(x)) << "\" y2=\"" << num(kTop + plot_h + 4) << "\" stroke=\"#999\"/>\n";
    svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << label(x) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">rescaled signal strength</text>\n";
  svg << "<text x=\"16\" y=\"" << num(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << num(kTop + plot_h / 2)
      << ")\">empirical success rate</text>\n";
  svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop - 10) << "\">"
      << mode_name(result.spec.mode) << " sweep, " << result.spec.trials
      << " trials/point</text>\n";

  // Reference line at 0.95 and the first curve's crossing.
  svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(0.95)) << "\" x2=\""
      << num(kLeft + plot_w) << "\" y2=\"" << num(py(0.95))
      << "\" stroke=\"#bbb\" stroke-dasharray=\"2 4\"/>\n";
  std::vector<std::optional<double>> xs = crossings(result);
  if (!xs.empty() && xs.front()) {
    double cx = px(*xs.front());
    svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(cx)
        << "\" y2=\"" << num(kTop + plot_h)
        << "\" stroke=\"#666\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << num(cx + 5) << "\" y=\"" << num(kTop + 14) << "\">0.95 at "
        << label(*xs.front()) << "</text>\n";
  }

  const std::size_t per_curve = result.spec.snr.size();
  for (std::size_t ci = 0; ci < result.spec.curves.size(); ++ci) {
    const char* color = kPalette[ci % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t gi = 0; gi < per_curve; ++gi) {
      const SweepRow& r = result.rows[ci * per_curve + gi];
      svg << num(px(r.snr_rescaled)) << "," << num(py(r.phat)) << " ";
    }
    svg << "\"/>\n";
    for (std::size_t gi = 0; gi < per_curve; ++gi) {
      const SweepRow& r = result.rows[ci * per_curve + gi];
      svg << "<circle cx=\"" << num(px(r.snr_rescaled)) << "\" cy=\"" << num(py(r.phat))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const CurveSpec& c = result.spec.curves[ci];
    double ly = kTop + 16 + 16.0 * ci;
    svg << "<line x1=\"" << num(kLeft + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(kLeft + 34) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << num(kLeft + 40) << "\" y=\"" << num(ly) << "\">" << c.n1 << "x"
        << c.n2 << ", block " << c.k1 << "x" << c.k2 << "</text>\n";
  }

  svg << "</g>\n</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path, "cannot open for writing");
  out << svg.str();
  if (!out) throw io_error(path, "write failed");
}

}  // namespace blocksense
