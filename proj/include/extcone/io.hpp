#pragma once

#include "extcone/field.hpp"

#include <string>
#include <vector>

namespace extcone {

// CSV conventions: '.' decimal, '\n' line endings, header row, floats with
// 17 significant digits so re-runs are byte-identical.
std::string format_double(double x);

void write_state_csv(const std::string& path, const FieldState& state);
FieldState read_state_csv(const std::string& path, int N, double t = 0.0);

void write_columns_csv(const std::string& path, const std::vector<std::string>& headers,
                       const std::vector<std::vector<double>>& columns);

// Minimal SVG polyline plot (diagnostic artifact, never an input).
void write_svg_plot(const std::string& path, const std::vector<double>& x,
                    const std::vector<std::vector<double>>& ys, const std::string& title,
                    bool log_y = false);

} // namespace extcone
