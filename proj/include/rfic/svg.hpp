#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rfic {

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal standalone line chart; non-finite points are skipped.
void write_svg_line_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace rfic
