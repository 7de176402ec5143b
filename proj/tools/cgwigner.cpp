// cgwigner: command-line front end for the coarse-grained Wigner library.

#include "cgwigner/config.hpp"
#include "cgwigner/error.hpp"
#include "cgwigner/experiments.hpp"
#include "cgwigner/grid_io.hpp"
#include "cgwigner/negativity.hpp"
#include "cgwigner/smoothed_well.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace cgw;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : Error {
    using Error::Error;
};

/// Flags shared by several commands; each overrides the config value when set.
struct CommonFlags {
    std::optional<std::string> config;
    std::optional<double> delta;
    std::optional<std::string> kernel;
    std::optional<double> tol;
    std::optional<double> cutoff;
    std::optional<int> max_levels;
    std::optional<unsigned> workers;
};

void add_smoothing_flags(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--delta", f.delta, "Kernel sharpness delta > 0");
    cmd->add_option("--kernel", f.kernel, "Kernel normalization: paper or unit");
}

void add_quadrature_flags(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--tol", f.tol, "Absolute tolerance");
    cmd->add_option("--cutoff", f.cutoff, "Radial (oscillator) or bulk momentum (well) cutoff");
    cmd->add_option("--max-levels", f.max_levels, "Maximum refinement levels");
}

RunConfig resolve(const CommonFlags& f)
{
    RunConfig cfg;
    if (auto path = resolve_config_path(f.config))
        cfg = load_config(*path);
    if (f.delta)
        cfg.set("delta", format_exact(*f.delta));
    if (f.kernel)
        cfg.kernel = parse_kernel(*f.kernel);
    if (f.tol)
        cfg.set("tol", format_exact(*f.tol));
    if (f.cutoff)
        cfg.set("cutoff", format_exact(*f.cutoff));
    if (f.max_levels)
        cfg.set("max_levels", std::to_string(*f.max_levels));
    if (f.workers)
        cfg.set("workers", std::to_string(*f.workers));
    return cfg;
}

std::optional<CoarseGrainSpec> smoothing_of(const RunConfig& cfg)
{
    if (!cfg.delta)
        return std::nullopt;
    return CoarseGrainSpec{*cfg.delta, cfg.kernel};
}

std::pair<double, double> parse_pair(const std::string& text, const char* what)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw UsageError(std::string(what) + ": expected A,B, got '" + text + "'");
    try {
        std::size_t used = 0;
        const std::string a = text.substr(0, comma);
        const std::string b = text.substr(comma + 1);
        const double x = std::stod(a, &used);
        if (used != a.size())
            throw std::invalid_argument(a);
        const double y = std::stod(b, &used);
        if (used != b.size())
            throw std::invalid_argument(b);
        return {x, y};
    } catch (const std::logic_error&) {
        throw UsageError(std::string(what) + ": bad number in '" + text + "'");
    }
}

std::string format_digits(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double evaluate(const StateSpec& spec, const std::optional<CoarseGrainSpec>& cg, PhasePoint pt)
{
    if (!cg)
        return wigner(spec, pt);
    switch (spec.kind) {
    case StateKind::HODiagonal:
        return FockProfile(spec.n, cg).value(pt);
    case StateKind::HOOffDiagonal:
        if (spec.m == spec.n)
            return FockProfile(spec.n, cg).value(pt);
        return SmoothedOffDiagonal(spec.m, spec.n, *cg)(pt);
    case StateKind::SquareWell:
        return SmoothedWell(spec.n, *cg)(pt);
    }
    return 0.0;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

void write_rows(const std::string& path, const std::vector<SweepRow>& rows)
{
    std::ostringstream buf;
    write_sweep_csv(buf, rows);
    write_text(path, buf.str());
}

std::string plot_stub(const std::string& csv, const std::string& x, const std::string& group)
{
    std::ostringstream s;
    s << "# Plot stub: reads " << csv << " only.\n"
      << "import csv\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "rows = list(csv.DictReader(open('" << csv << "')))\n"
      << "groups = {}\n"
      << "for r in rows:\n"
      << "    groups.setdefault(r['" << group << "'], []).append((float(r['" << x
      << "']), float(r['eta'])))\n"
      << "for key, pts in sorted(groups.items(), key=lambda kv: float(kv[0])):\n"
      << "    pts.sort()\n"
      << "    plt.plot([p[0] for p in pts], [p[1] for p in pts], label='" << group << "=' + key)\n"
      << "plt.xlabel('" << x << "')\n"
      << "plt.ylabel('eta')\n"
      << "plt.legend()\n"
      << "plt.savefig('" << csv.substr(0, csv.find('.')) << ".png')\n";
    return s.str();
}

int run(int argc, char** argv)
{
    CLI::App app{"Negativity of coarse-grained Wigner functions"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonFlags flags;
    app.add_option("--config", flags.config, std::string("Config file (default: $") + kConfigEnv + ")");

    // eval
    std::string state_text;
    std::string at_text;
    int digits = 12;
    auto* eval = app.add_subcommand("eval", "Print W(x,p), optionally smoothed");
    eval->add_option("--state", state_text, "ho:n=N | ho:m=M,n=N | well:n=N")->required();
    eval->add_option("--at", at_text, "Phase-space point X,P")->required();
    eval->add_option("--digits", digits, "Significant digits")->check(CLI::Range(1, 17));
    add_smoothing_flags(eval, flags);

    // grid
    std::optional<std::string> x_bounds, p_bounds;
    std::optional<std::size_t> nx, np;
    std::string out_path;
    auto* grid = app.add_subcommand("grid", "Sample W on a cell-centred grid");
    grid->add_option("--state", state_text, "State")->required();
    grid->add_option("--x", x_bounds, "x range LO,HI");
    grid->add_option("--p", p_bounds, "p range LO,HI");
    grid->add_option("--nx", nx, "Cells along x");
    grid->add_option("--np", np, "Cells along p");
    grid->add_option("--out", out_path, "Output file (.csv or .json)")->required();

    // smooth
    std::string in_path;
    bool direct = false;
    auto* smooth = app.add_subcommand("smooth", "Gaussian-smooth a stored grid");
    smooth->add_option("--in", in_path, "Input grid")->required();
    smooth->add_option("--out", out_path, "Output grid")->required();
    smooth->add_flag("--direct", direct, "Use the direct 2D reference sum");
    add_smoothing_flags(smooth, flags);

    // negativity
    std::optional<std::string> grid_path;
    bool raw = false;
    auto* neg = app.add_subcommand("negativity", "Print the negativity as JSON");
    auto* neg_state = neg->add_option("--state", state_text, "State");
    auto* neg_grid = neg->add_option("--grid", grid_path, "Stored grid (brute-force cell sum)");
    neg_state->excludes(neg_grid);
    neg->add_flag("--raw", raw, "Ignore any configured delta");
    add_smoothing_flags(neg, flags);
    add_quadrature_flags(neg, flags);

    // sweep
    std::string kind = "ho";
    std::string n_range, m_range = "0..8", dm_range = "0..4", delta_range;
    auto* sweep = app.add_subcommand("sweep", "Negativity over (state, delta) ranges as CSV");
    sweep->add_option("--kind", kind, "ho | offdiag | well")
        ->check(CLI::IsMember({"ho", "offdiag", "well"}));
    sweep->add_option("--n", n_range, "n range a..b or list");
    sweep->add_option("--m", m_range, "m range (offdiag)");
    sweep->add_option("--dm", dm_range, "m - n range (offdiag)");
    sweep->add_option("--delta", delta_range, "delta range a..b or list");
    sweep->add_option("--out", out_path, "Output CSV")->required();
    sweep->add_option("--workers", flags.workers, "Worker threads");
    sweep->add_option("--kernel", flags.kernel, "paper or unit");
    add_quadrature_flags(sweep, flags);

    // fig
    int which = 1;
    std::optional<std::string> fig_dir;
    auto* fig = app.add_subcommand("fig", "Figure data with default ranges plus plot stubs");
    fig->add_option("--which", which, "Figure 1-4")->required()->check(CLI::Range(1, 4));
    fig->add_option("--out", fig_dir, "Output directory");
    fig->add_option("--workers", flags.workers, "Worker threads");
    fig->add_option("--kernel", flags.kernel, "paper or unit");
    add_quadrature_flags(fig, flags);

    // scan
    std::string mode;
    int scan_n = 1;
    std::optional<double> p0, pmax;
    int panels = 0;
    int octaves = 4;
    double rel_tol = 1e-3;
    std::string integrand = "exact";
    std::optional<std::string> scan_out;
    auto* scan = app.add_subcommand("scan", "Momentum-tail scans of the square well as JSON");
    scan->add_option("mode", mode, "divergence | tail")
        ->required()
        ->check(CLI::IsMember({"divergence", "tail"}));
    scan->add_option("--n", scan_n, "Well level");
    scan->add_option("--p0", p0, "First panel edge (default 50 n)");
    scan->add_option("--pmax", pmax, "Last edge for divergence (default 16 p0)");
    scan->add_option("--panels", panels, "Panel count (default: base-2 panels)");
    scan->add_option("--octaves", octaves, "Octaves for tail");
    scan->add_option("--rel-tol", rel_tol, "Relative refinement tolerance per panel");
    scan->add_option("--integrand", integrand, "exact | leading")
        ->check(CLI::IsMember({"exact", "leading"}));
    scan->add_option("--out", scan_out, "Output JSON (default stdout)");
    add_smoothing_flags(scan, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    RunConfig cfg = resolve(flags);

    if (*eval) {
        const StateSpec spec = parse_state(state_text);
        const auto [x, p] = parse_pair(at_text, "--at");
        std::cout << format_digits(evaluate(spec, smoothing_of(cfg), {x, p}), digits) << '\n';
        return 0;
    }
    if (*grid) {
        const StateSpec spec = parse_state(state_text);
        if (x_bounds)
            std::tie(cfg.x_min, cfg.x_max) = parse_pair(*x_bounds, "--x");
        if (p_bounds)
            std::tie(cfg.p_min, cfg.p_max) = parse_pair(*p_bounds, "--p");
        const auto geo = GridGeometry::from_bounds(cfg.x_min, cfg.x_max, cfg.p_min, cfg.p_max,
                                                   nx.value_or(cfg.nx), np.value_or(cfg.np));
        save_grid(out_path, grid_sample(spec, geo));
        return 0;
    }
    if (*smooth) {
        const auto cg = smoothing_of(cfg);
        if (!cg)
            throw UsageError("smooth needs --delta (or delta in the config)");
        const WignerGrid g = load_grid(in_path);
        save_grid(out_path, direct ? grid_convolve_direct(g, *cg) : grid_convolve(g, *cg));
        return 0;
    }
    if (*neg) {
        NegativityResult r;
        if (grid_path) {
            r = negativity_grid(load_grid(*grid_path));
        } else {
            if (state_text.empty())
                throw UsageError("negativity needs --state or --grid");
            const StateSpec spec = parse_state(state_text);
            r = negativity_adaptive(spec, raw ? std::nullopt : smoothing_of(cfg), cfg.quadrature);
        }
        std::cout << to_json(r).dump() << '\n';
        return 0;
    }
    SweepOptions sopt;
    sopt.quadrature = cfg.quadrature;
    sopt.mass = cfg.kernel;
    sopt.workers = cfg.workers;
    if (*sweep) {
        std::vector<double> deltas;
        if (!delta_range.empty())
            deltas = parse_real_range(delta_range);
        else if (cfg.delta)
            deltas = {*cfg.delta};
        else
            throw UsageError("sweep needs --delta");
        std::vector<SweepRow> rows;
        if (kind == "ho")
            rows = sweep_ho(parse_int_range(n_range.empty() ? "0..40" : n_range), deltas, sopt);
        else if (kind == "offdiag")
            rows = sweep_offdiag(parse_int_range(m_range), parse_int_range(dm_range), deltas, sopt);
        else
            rows = sweep_well(parse_int_range(n_range.empty() ? "1..8" : n_range), deltas, sopt);
        write_rows(out_path, rows);
        return 0;
    }
    if (*fig) {
        namespace fs = std::filesystem;
        const fs::path dir = fig_dir.value_or(cfg.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create '" + dir.string() + "': " + ec.message());
        const std::string stem = "fig" + std::to_string(which);
        const std::string csv = stem + ".csv";
        std::vector<SweepRow> rows;
        std::string x_col = "n", group = "delta";
        if (which == 1 || which == 2) {
            rows = sweep_ho(parse_int_range("0..40"), parse_real_range("3..14"), sopt);
        } else if (which == 3) {
            rows = sweep_offdiag(parse_int_range("0..8"), parse_int_range("0..4"), {3.0, 50.0}, sopt);
            x_col = "m";
        } else {
            rows = sweep_well(parse_int_range("1..8"), {1.0, 2.0, 4.0, 8.0, 16.0}, sopt);
        }
        write_rows((dir / csv).string(), rows);
        write_text((dir / (stem + "_plot.py")).string(), plot_stub(csv, x_col, group));
        if (which == 2)
            write_text((dir / (stem + "_nmax.json")).string(), to_json(nmax_fit(rows)).dump(2) + "\n");
        return 0;
    }
    if (*scan) {
        nlohmann::json report;
        const double start = p0.value_or(50.0 * scan_n);
        if (mode == "divergence") {
            report = to_json(divergence_scan(scan_n, start, pmax.value_or(16.0 * start), panels,
                                             parse_integrand(integrand), rel_tol));
        } else {
            const CoarseGrainSpec cg{cfg.delta.value_or(1.0), cfg.kernel};
            report = to_json(tail_convergence_scan(scan_n, cg, start, octaves, rel_tol));
        }
        if (scan_out)
            write_text(*scan_out, report.dump(2) + "\n");
        else
            std::cout << report.dump(2) << '\n';
        return 0;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const cgw::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const cgw::NoInteriorMaximum& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const cgw::Error& e) {
        // Remaining library errors reject the requested parameters.
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
