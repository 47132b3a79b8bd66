#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sntk::cli {

/// 9 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string fmt(double v);

/// v rounded to 9 significant digits, so JSON output matches fmt().
double round9(double v);

void csv_row(std::ostream& out, const std::vector<std::string>& cells);
void csv_row(std::ostream& out, const std::vector<double>& cells);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string colour = "#1f4e9c";
  bool markers = false;  // scatter instead of polyline
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
};

/// Panels side by side, each with its own axes box and tick labels.
void write_svg(std::ostream& out, const std::vector<Panel>& panels);

}  // namespace sntk::cli
