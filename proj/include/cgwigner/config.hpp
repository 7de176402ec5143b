#pragma once

#include "cgwigner/negativity.hpp"

#include <map>
#include <optional>
#include <string>

namespace cgw {

/// Environment variable naming the config file when --config is absent.
inline constexpr const char* kConfigEnv = "CGWIGNER_CONFIG";

/// Defaults shared by the CLI commands.
///
/// Keys (all optional):
///   delta = 3            kernel = paper | unit
///   tol = 1e-6           cutoff = 12          max_levels = 8
///   workers = 1          output_dir = .
///   grid.x_min = -8      grid.x_max = 8       grid.nx = 256
///   grid.p_min = -8      grid.p_max = 8       grid.np = 256
struct RunConfig {
    std::optional<double> delta;
    KernelMass kernel = KernelMass::PaperUnnormalized;
    QuadratureSpec quadrature;
    unsigned workers = 1;
    std::string output_dir = ".";
    double x_min = -8.0;
    double x_max = 8.0;
    double p_min = -8.0;
    double p_max = 8.0;
    std::size_t nx = 256;
    std::size_t np = 256;

    /// Applies one key. Throws ParseError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
};

/// Parses `key = value` lines; `#` starts a comment. Throws ParseError with
/// the line number on malformed lines.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Built-in defaults overlaid with the file's entries.
RunConfig load_config(const std::string& path);

/// --config if given, else $CGWIGNER_CONFIG if set, else nothing.
std::optional<std::string> resolve_config_path(const std::optional<std::string>& flag);

KernelMass parse_kernel(const std::string& text);
std::string kernel_name(KernelMass mass);

/// "a..b" (inclusive) or "a,b,c".
std::vector<int> parse_int_range(const std::string& text);
std::vector<double> parse_real_range(const std::string& text);

} // namespace cgw
