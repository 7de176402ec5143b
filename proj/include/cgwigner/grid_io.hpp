#pragma once

#include "cgwigner/smoothing.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace cgw {

// CSV layout: an optional "# grid x0=.. p0=.. dx=.. dp=.. nx=.. np=.." line
// carrying the exact geometry, the header row "x,p,w", then one row per cell
// in x-major order. Every number is written with 17 significant digits.
void write_grid_csv(std::ostream& out, const WignerGrid& grid);
WignerGrid read_grid_csv(std::istream& in);

nlohmann::json grid_to_json(const WignerGrid& grid);
WignerGrid grid_from_json(const nlohmann::json& j);

void save_grid(const std::string& path, const WignerGrid& grid);
WignerGrid load_grid(const std::string& path);

/// printf("%.17g")
std::string format_exact(double v);

} // namespace cgw
