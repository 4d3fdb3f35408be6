#include "plot_svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "speccam/error.hpp"

namespace speccam::plot {

namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kMarginLeft = 70.0, kMarginRight = 30.0;
constexpr double kMarginTop = 40.0, kMarginBottom = 60.0;

struct Axes {
  double xmin, xmax, ymin, ymax;

  double px(double x) const {
    return kMarginLeft +
           (x - xmin) / (xmax - xmin) * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom -
           (y - ymin) / (ymax - ymin) * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::ofstream open_svg(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n"
      << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  return out;
}

void draw_frame(std::ofstream& out, const Axes& ax, const std::string& title,
                const std::string& xlabel, const std::string& ylabel) {
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"400\" y=\"25\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<text x=\"400\" y=\"585\" text-anchor=\"middle\" font-size=\"13\">"
      << xlabel << "</text>\n";
  out << "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-size=\"13\" "
         "transform=\"rotate(-90 20 300)\">"
      << ylabel << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = ax.xmin + (ax.xmax - ax.xmin) * i / 4.0;
    const double fy = ax.ymin + (ax.ymax - ax.ymin) * i / 4.0;
    out << "<text x=\"" << ax.px(fx) << "\" y=\"" << kHeight - kMarginBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fx << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << ax.py(fy) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << fy << "</text>\n";
  }
}

Axes fit_axes(const PredictionPairs& pairs) {
  double lo = pairs.front().first, hi = lo;
  for (const auto& [t, p] : pairs) {
    lo = std::min({lo, t, p});
    hi = std::max({hi, t, p});
  }
  const double pad = (hi - lo) * 0.05 + 1e-9;
  return {lo - pad, hi + pad, lo - pad, hi + pad};
}

}  // namespace

void scatter_with_band(const PredictionPairs& pairs, const std::string& title,
                       const std::filesystem::path& path) {
  auto out = open_svg(path);
  Axes ax = fit_axes(pairs);
  draw_frame(out, ax, title, "blood test BBL (umol/L)", "prediction (umol/L)");

  if (pairs.size() >= 4) {
    try {
      const PredictionBand band = prediction_band_95(pairs);
      std::ostringstream upper, lower;
      for (int i = 0; i <= 60; ++i) {
        const double x = ax.xmin + (ax.xmax - ax.xmin) * i / 60.0;
        auto [lo, hi] = band.at(x);
        upper << (i ? " " : "") << ax.px(x) << "," << ax.py(hi);
        lower << " " << ax.px(ax.xmax - (ax.xmax - ax.xmin) * i / 60.0) << ","
              << ax.py(band.at(ax.xmax - (ax.xmax - ax.xmin) * i / 60.0).first);
      }
      out << "<polygon points=\"" << upper.str() << lower.str()
          << "\" fill=\"#ffcccc\" opacity=\"0.6\"/>\n";
    } catch (const Error&) {
      // constant truth column: skip the band, keep the scatter
    }
  }
  out << "<line x1=\"" << ax.px(ax.xmin) << "\" y1=\"" << ax.py(ax.xmin)
      << "\" x2=\"" << ax.px(ax.xmax) << "\" y2=\"" << ax.py(ax.xmax)
      << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  for (const auto& [t, p] : pairs)
    out << "<circle cx=\"" << ax.px(t) << "\" cy=\"" << ax.py(p)
        << "\" r=\"2.5\" fill=\"crimson\"/>\n";
  out << "</svg>\n";
}

void bland_altman_plot(const PredictionPairs& pairs,
                       const AgreementReport& report,
                       const std::filesystem::path& path) {
  auto out = open_svg(path);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, p] : pairs) {
    const double mean = (t + p) / 2.0, diff = p - t;
    pts.emplace_back(mean, diff);
    xmin = std::min(xmin, mean);
    xmax = std::max(xmax, mean);
    ymin = std::min(ymin, diff);
    ymax = std::max(ymax, diff);
  }
  ymin = std::min(ymin, report.loa_lower);
  ymax = std::max(ymax, report.loa_upper);
  const double xpad = (xmax - xmin) * 0.05 + 1e-9;
  const double ypad = (ymax - ymin) * 0.05 + 1e-9;
  Axes ax{xmin - xpad, xmax + xpad, ymin - ypad, ymax + ypad};
  draw_frame(out, ax, "Bland-Altman", "mean of truth and prediction (umol/L)",
             "prediction - truth (umol/L)");

  auto hline = [&](double y, const char* dash) {
    out << "<line x1=\"" << ax.px(ax.xmin) << "\" y1=\"" << ax.py(y)
        << "\" x2=\"" << ax.px(ax.xmax) << "\" y2=\"" << ax.py(y)
        << "\" stroke=\"crimson\"" << dash << "/>\n";
  };
  hline(report.md, "");
  hline(report.loa_upper, " stroke-dasharray=\"6\"");
  hline(report.loa_lower, " stroke-dasharray=\"6\"");
  for (const auto& [x, y] : pts)
    out << "<circle cx=\"" << ax.px(x) << "\" cy=\"" << ax.py(y)
        << "\" r=\"2.5\" fill=\"black\"/>\n";
  out << "</svg>\n";
}

void roc_plot(const RocReport& report, const std::filesystem::path& path) {
  auto out = open_svg(path);
  Axes ax{0.0, 1.0, 0.0, 1.0};
  std::ostringstream title;
  title << "ROC (threshold " << report.threshold << " umol/L, AUROC "
        << report.auroc << ")";
  draw_frame(out, ax, title.str(), "false positive rate", "true positive rate");
  out << "<line x1=\"" << ax.px(0) << "\" y1=\"" << ax.py(0) << "\" x2=\""
      << ax.px(1) << "\" y2=\"" << ax.py(1)
      << "\" stroke=\"gray\" stroke-dasharray=\"4\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"2\" "
         "points=\"";
  for (const auto& [fpr, tpr] : report.points)
    out << ax.px(fpr) << "," << ax.py(tpr) << " ";
  out << "\"/>\n</svg>\n";
}

void curve_plot(const LearningCurve& curve, const std::filesystem::path& path) {
  auto out = open_svg(path);
  Axes ax{0.0, 1.05, 0.0, 1.05};
  draw_frame(out, ax, "learning curve: Pearson r vs resampling fraction",
             "resampling fraction", "Pearson r");
  auto polyline = [&](const std::vector<LearningCurvePoint>& pts,
                      const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : pts) out << ax.px(p.fraction) << "," << ax.py(p.r) << " ";
    out << "\"/>\n";
  };
  polyline(curve.sal, "crimson");
  polyline(curve.rgbl, "black");
  out << "<text x=\"120\" y=\"70\" fill=\"crimson\" font-size=\"13\">SAL</text>\n"
      << "<text x=\"120\" y=\"90\" fill=\"black\" font-size=\"13\">RGBL</text>\n"
      << "</svg>\n";
}

}  // namespace speccam::plot
