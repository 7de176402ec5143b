#include "cgwigner/config.hpp"

#include "cgwigner/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cgw {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ParseError(key + ": bad number '" + v + "'");
    return out;
}

long to_int(const std::string& key, const std::string& v)
{
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError(key + ": bad integer '" + v + "'");
    return out;
}

std::size_t to_count(const std::string& key, const std::string& v)
{
    const long n = to_int(key, v);
    if (n <= 0)
        throw ParseError(key + ": must be positive");
    return static_cast<std::size_t>(n);
}

} // namespace

KernelMass parse_kernel(const std::string& text)
{
    if (text == "paper")
        return KernelMass::PaperUnnormalized;
    if (text == "unit")
        return KernelMass::UnitMass;
    throw ParseError("unknown kernel '" + text + "' (expected paper or unit)");
}

std::string kernel_name(KernelMass mass)
{
    return mass == KernelMass::UnitMass ? "unit" : "paper";
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    if (key == "delta") {
        const double d = to_real(key, value);
        if (!(d > 0.0))
            throw ParseError("delta: must be positive");
        delta = d;
    } else if (key == "kernel") {
        kernel = parse_kernel(value);
    } else if (key == "tol") {
        quadrature.abs_tolerance = to_real(key, value);
    } else if (key == "cutoff") {
        quadrature.cutoff = to_real(key, value);
    } else if (key == "max_levels") {
        quadrature.max_refinement_levels = static_cast<int>(to_count(key, value));
    } else if (key == "workers") {
        workers = static_cast<unsigned>(to_count(key, value));
    } else if (key == "output_dir") {
        output_dir = value;
    } else if (key == "grid.x_min") {
        x_min = to_real(key, value);
    } else if (key == "grid.x_max") {
        x_max = to_real(key, value);
    } else if (key == "grid.p_min") {
        p_min = to_real(key, value);
    } else if (key == "grid.p_max") {
        p_max = to_real(key, value);
    } else if (key == "grid.nx") {
        nx = to_count(key, value);
    } else if (key == "grid.np") {
        np = to_count(key, value);
    } else {
        throw ParseError("unknown config key '" + key + "'");
    }
    try {
        quadrature.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(key + ": " + e.what());
    }
}

std::map<std::string, std::string> parse_config_text(const std::string& text)
{
    std::map<std::string, std::string> entries;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("config line " + std::to_string(lineno) + ": empty key or value");
        entries[key] = value;
    }
    return entries;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg;
    for (const auto& [k, v] : parse_config_text(buf.str()))
        cfg.set(k, v);
    return cfg;
}

std::optional<std::string> resolve_config_path(const std::optional<std::string>& flag)
{
    if (flag)
        return flag;
    if (const char* env = std::getenv(kConfigEnv); env && *env)
        return std::string(env);
    return std::nullopt;
}

namespace {

template <class T>
T parse_item(const std::string& s)
{
    const std::string t = trim(s);
    T v{};
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw ParseError("bad range item '" + s + "'");
    return v;
}

template <class T>
std::vector<T> parse_range(const std::string& text)
{
    std::vector<T> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const T lo = parse_item<T>(text.substr(0, dots));
        const T hi = parse_item<T>(text.substr(dots + 2));
        if (hi < lo)
            throw ParseError("range '" + text + "' is empty");
        if constexpr (std::is_integral_v<T>) {
            for (T v = lo; v <= hi; ++v)
                out.push_back(v);
        } else {
            // Unit steps from lo; the upper end is included when it lands on one.
            const long steps = static_cast<long>(std::floor(hi - lo + 1e-9));
            for (long k = 0; k <= steps; ++k)
                out.push_back(lo + static_cast<T>(k));
        }
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_item<T>(item));
    if (out.empty())
        throw ParseError("empty range '" + text + "'");
    return out;
}

} // namespace

std::vector<int> parse_int_range(const std::string& text)
{
    return parse_range<int>(text);
}

std::vector<double> parse_real_range(const std::string& text)
{
    return parse_range<double>(text);
}

} // namespace cgw
