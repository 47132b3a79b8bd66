#include "emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace sntk::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt(v).c_str(), nullptr);
}

void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

void csv_row(std::ostream& out, const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(fmt(v));
  csv_row(out, s);
}

namespace {

constexpr double kPanelW = 360.0, kPanelH = 300.0;
constexpr double kLeft = 62.0, kRight = 14.0, kTop = 30.0, kBottom = 44.0;

std::string esc(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      default: r += c;
    }
  }
  return r;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1e-6, 0.05 * std::abs(hi));
      lo -= pad;
      hi += pad;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

// About five round tick values in [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {2.0, 5.0, 10.0}) {
    if (step >= raw) break;
    step = f * mag;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return t;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<Panel>& panels) {
  const double W = kPanelW * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\""
      << num(kPanelH) << "\" viewBox=\"0 0 " << num(W) << ' ' << num(kPanelH)
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const Panel& p = panels[k];
    const double x0 = kPanelW * static_cast<double>(k) + kLeft, x1 = kPanelW * static_cast<double>(k + 1) - kRight;
    const double y0 = kTop, y1 = kPanelH - kBottom;
    Range rx, ry;
    for (const Series& s : p.series) {
      for (double v : s.x) rx.add(v);
      for (double v : s.y) ry.add(v);
    }
    rx.settle();
    ry.settle();
    auto X = [&](double v) { return x0 + (v - rx.lo) / (rx.hi - rx.lo) * (x1 - x0); };
    auto Y = [&](double v) { return y1 - (v - ry.lo) / (ry.hi - ry.lo) * (y1 - y0); };

    out << "<g>\n<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
        << esc(p.title) << "</text>\n";
    out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(y1 - y0) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(rx.lo, rx.hi)) {
      out << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(X(t)) << "\" y2=\""
          << num(y1 + 4) << "\" stroke=\"black\"/><text x=\"" << num(X(t)) << "\" y=\"" << num(y1 + 16)
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(ry.lo, ry.hi)) {
      out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(x0) << "\" y2=\""
          << num(Y(t)) << "\" stroke=\"black\"/><text x=\"" << num(x0 - 6) << "\" y=\"" << num(Y(t) + 4)
          << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(kPanelH - 8)
        << "\" text-anchor=\"middle\">" << esc(p.xlabel) << "</text>\n";
    out << "<text transform=\"translate(" << num(x0 - 46) << ',' << num(0.5 * (y0 + y1))
        << ") rotate(-90)\" text-anchor=\"middle\">" << esc(p.ylabel) << "</text>\n";
    for (const Series& s : p.series) {
      if (s.markers) {
        out << "<g fill=\"" << s.colour << "\">";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
          if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
          out << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\"1.6\"/>";
        }
        out << "</g>\n";
        continue;
      }
      out << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << (first ? "" : " ") << num(X(s.x[i])) << ',' << num(Y(s.y[i]));
        first = false;
      }
      out << "\"><title>" << esc(s.label) << "</title></polyline>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace sntk::cli
