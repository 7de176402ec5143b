#include "cgwigner/grid_io.hpp"

#include "cgwigner/error.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cgw {

std::string format_exact(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

double parse_double(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("bad number '" + std::string(s) + "'");
    return v;
}

std::size_t parse_count(std::string_view s)
{
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("bad count '" + std::string(s) + "'");
    return v;
}

} // namespace

void write_grid_csv(std::ostream& out, const WignerGrid& grid)
{
    const auto& g = grid.geometry;
    out << "# grid x0=" << format_exact(g.x0) << " p0=" << format_exact(g.p0)
        << " dx=" << format_exact(g.dx) << " dp=" << format_exact(g.dp) << " nx=" << g.nx
        << " np=" << g.np << '\n';
    out << "x,p,w\n";
    for (std::size_t i = 0; i < g.nx; ++i) {
        const std::string xs = format_exact(g.x_at(i));
        for (std::size_t j = 0; j < g.np; ++j)
            out << xs << ',' << format_exact(g.p_at(j)) << ',' << format_exact(grid.at(i, j))
                << '\n';
    }
}

WignerGrid read_grid_csv(std::istream& in)
{
    std::string line;
    std::map<std::string, std::string> meta;
    bool header_seen = false;
    std::vector<double> xs, ps, ws;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream fields(line.substr(1));
            std::string tok;
            while (fields >> tok) {
                const auto eq = tok.find('=');
                if (eq != std::string::npos)
                    meta[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "x,p,w")
                throw ParseError("grid CSV: expected header 'x,p,w', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError("grid CSV: malformed row '" + line + "'");
        std::string_view sv(line);
        xs.push_back(parse_double(sv.substr(0, c1)));
        ps.push_back(parse_double(sv.substr(c1 + 1, c2 - c1 - 1)));
        ws.push_back(parse_double(sv.substr(c2 + 1)));
    }
    if (!header_seen || ws.empty())
        throw ParseError("grid CSV: no data");

    WignerGrid grid;
    auto& g = grid.geometry;
    if (meta.count("nx") && meta.count("np") && meta.count("x0") && meta.count("p0")
        && meta.count("dx") && meta.count("dp")) {
        g.x0 = parse_double(meta["x0"]);
        g.p0 = parse_double(meta["p0"]);
        g.dx = parse_double(meta["dx"]);
        g.dp = parse_double(meta["dp"]);
        g.nx = parse_count(meta["nx"]);
        g.np = parse_count(meta["np"]);
    } else {
        // No geometry line: recover it from the cell centres.
        std::size_t np = 1;
        while (np < xs.size() && xs[np] == xs[0])
            ++np;
        if (ws.size() % np != 0)
            throw ParseError("grid CSV: ragged rows");
        g.np = np;
        g.nx = ws.size() / np;
        g.dp = np > 1 ? (ps[np - 1] - ps[0]) / static_cast<double>(np - 1) : 1.0;
        g.dx = g.nx > 1 ? (xs[(g.nx - 1) * np] - xs[0]) / static_cast<double>(g.nx - 1) : 1.0;
        g.x0 = xs[0] - 0.5 * g.dx;
        g.p0 = ps[0] - 0.5 * g.dp;
    }
    g.validate();
    if (g.size() != ws.size())
        throw ParseError("grid CSV: row count does not match geometry");
    grid.values = std::move(ws);
    return grid;
}

nlohmann::json grid_to_json(const WignerGrid& grid)
{
    const auto& g = grid.geometry;
    return {
        {"geometry",
         {{"x0", g.x0}, {"p0", g.p0}, {"dx", g.dx}, {"dp", g.dp}, {"nx", g.nx}, {"np", g.np}}},
        {"values", grid.values},
    };
}

WignerGrid grid_from_json(const nlohmann::json& j)
{
    try {
        WignerGrid grid;
        const auto& geo = j.at("geometry");
        auto& g = grid.geometry;
        g.x0 = geo.at("x0").get<double>();
        g.p0 = geo.at("p0").get<double>();
        g.dx = geo.at("dx").get<double>();
        g.dp = geo.at("dp").get<double>();
        g.nx = geo.at("nx").get<std::size_t>();
        g.np = geo.at("np").get<std::size_t>();
        g.validate();
        grid.values = j.at("values").get<std::vector<double>>();
        if (grid.values.size() != g.size())
            throw ParseError("grid JSON: value count does not match geometry");
        return grid;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("grid JSON: ") + e.what());
    }
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

void save_grid(const std::string& path, const WignerGrid& grid)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    if (ends_with(path, ".json"))
        out << grid_to_json(grid).dump() << '\n';
    else
        write_grid_csv(out, grid);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

WignerGrid load_grid(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    if (ends_with(path, ".json")) {
        try {
            return grid_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("grid JSON: ") + e.what());
        }
    }
    return read_grid_csv(in);
}

} // namespace cgw
