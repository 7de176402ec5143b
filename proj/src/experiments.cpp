#include "cgwigner/experiments.hpp"

#include "cgwigner/error.hpp"
#include "cgwigner/grid_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace cgw {

StateSpec SweepRow::state() const
{
    switch (kind) {
    case StateKind::HODiagonal:
        return StateSpec::ho(n);
    case StateKind::HOOffDiagonal:
        return StateSpec::ho_offdiag(m.value_or(n), n);
    case StateKind::SquareWell:
        return StateSpec::square_well(n);
    }
    throw InvalidArgument("unknown state kind");
}

namespace {

std::vector<SweepRow> run_rows(std::vector<SweepRow> rows, const SweepOptions& opt)
{
    run_jobs(rows.size(), opt.workers, [&](std::size_t i) {
        SweepRow& row = rows[i];
        const NegativityResult r =
            negativity_adaptive(row.state(), CoarseGrainSpec{row.delta, opt.mass}, opt.quadrature);
        row.eta = r.eta;
        row.eta_err = r.error_estimate;
        row.status = r.status;
    });
    return rows;
}

void require_nonempty(const std::vector<int>& a, const std::vector<double>& b)
{
    if (a.empty() || b.empty())
        throw InvalidArgument("sweep ranges must be nonempty");
}

std::vector<double> sorted_unique(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<int> sorted_unique(std::vector<int> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

std::vector<SweepRow> sweep_ho(const std::vector<int>& ns, const std::vector<double>& deltas,
                               const SweepOptions& opt)
{
    require_nonempty(ns, deltas);
    std::vector<SweepRow> rows;
    for (double d : sorted_unique(deltas))
        for (int n : sorted_unique(ns)) {
            StateSpec::ho(n);
            rows.push_back({StateKind::HODiagonal, n, std::nullopt, d});
        }
    return run_rows(std::move(rows), opt);
}

std::vector<SweepRow> sweep_offdiag(const std::vector<int>& ms, const std::vector<int>& dms,
                                    const std::vector<double>& deltas, const SweepOptions& opt)
{
    require_nonempty(ms, deltas);
    if (dms.empty())
        throw InvalidArgument("sweep ranges must be nonempty");
    std::vector<SweepRow> rows;
    for (double d : sorted_unique(deltas))
        for (int m : sorted_unique(ms))
            for (int dm : sorted_unique(dms)) {
                if (dm < 0)
                    throw InvalidArgument("m - n must be >= 0");
                if (dm > m)
                    continue;
                rows.push_back({StateKind::HOOffDiagonal, m - dm, m, d});
            }
    return run_rows(std::move(rows), opt);
}

std::vector<SweepRow> sweep_well(const std::vector<int>& ns, const std::vector<double>& deltas,
                                 const SweepOptions& opt)
{
    require_nonempty(ns, deltas);
    std::vector<SweepRow> rows;
    for (double d : sorted_unique(deltas))
        for (int n : sorted_unique(ns)) {
            StateSpec::square_well(n);
            rows.push_back({StateKind::SquareWell, n, std::nullopt, d});
        }
    return run_rows(std::move(rows), opt);
}

// ---------------------------------------------------------------------------

namespace {

struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto N = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / N;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / N;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    Line line;
    line.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    line.intercept = my - line.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (line.intercept + line.slope * x[i]);
        ssr += r * r;
    }
    line.rms = std::sqrt(ssr / N);
    if (x.size() > 2 && sxx > 0.0)
        line.slope_stderr = std::sqrt(ssr / (N - 2.0) / sxx);
    return line;
}

std::size_t argmax_first(const std::vector<double>& v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best])
            best = i;
    return best;
}

} // namespace

NmaxFit nmax_fit(const std::vector<SweepRow>& rows, std::uint64_t jitter_seed)
{
    std::map<double, std::vector<const SweepRow*>> columns;
    for (const auto& r : rows)
        columns[r.delta].push_back(&r);
    if (columns.empty())
        throw InvalidArgument("nmax_fit: no rows");

    NmaxFit fit;
    std::mt19937_64 rng(jitter_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& [delta, col] : columns) {
        std::sort(col.begin(), col.end(), [](auto* a, auto* b) { return a->n < b->n; });
        std::vector<double> eta;
        for (auto* r : col)
            eta.push_back(r->eta);
        const std::size_t best = argmax_first(eta);
        if (best == 0 || best + 1 == eta.size())
            throw NoInteriorMaximum("no interior maximum in the delta = " + format_exact(delta)
                                    + " column");
        fit.deltas.push_back(delta);
        fit.nmax.push_back(col[best]->n);

        std::vector<double> jittered(eta.size());
        for (std::size_t i = 0; i < eta.size(); ++i)
            jittered[i] = eta[i] + col[i]->eta_err * unit(rng);
        const std::size_t moved = argmax_first(jittered);
        if (std::abs(col[moved]->n - col[best]->n) > 1)
            fit.fragile_deltas.push_back(delta);
    }
    std::vector<double> y(fit.nmax.begin(), fit.nmax.end());
    const Line line = least_squares(fit.deltas, y);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.slope_stderr = line.slope_stderr;
    return fit;
}

// ---------------------------------------------------------------------------

std::string integrand_name(WellIntegrand w)
{
    return w == WellIntegrand::Exact ? "exact" : "leading";
}

WellIntegrand parse_integrand(const std::string& text)
{
    if (text == "exact")
        return WellIntegrand::Exact;
    if (text == "leading")
        return WellIntegrand::LeadingOrder;
    throw ParseError("unknown integrand '" + text + "' (expected exact or leading)");
}

double leading_order_well(int n, double x, double p)
{
    if (x < 0.0 || x > kWellWidth || p == 0.0)
        return 0.0;
    const double xt = x > kWellWidth / 2.0 ? kWellWidth - x : x;
    return (1.0 - std::cos(2.0 * n * xt)) * std::sin(2.0 * p * xt) / (kPi * kPi * p);
}

namespace {

std::vector<double> geometric_edges(double lo, double hi, int panels)
{
    std::vector<double> edges{lo};
    const double ratio = std::pow(hi / lo, 1.0 / panels);
    for (int k = 1; k < panels; ++k)
        edges.push_back(lo * std::pow(ratio, k));
    edges.push_back(hi);
    return edges;
}

} // namespace

DivergenceScan divergence_scan(int n, double p0, double p_max, int panels, WellIntegrand integrand,
                               double rel_tol)
{
    StateSpec::square_well(n);
    if (!(p0 >= 50.0 * n))
        throw InvalidArgument("divergence scan needs p0 >= 50 n (p0 = " + format_exact(p0) + ")");
    if (!(p_max >= 8.0 * p0))
        throw InvalidArgument("divergence scan needs p_max >= 8 p0");
    if (panels < 0)
        throw InvalidArgument("panel count must be >= 0");
    if (panels == 0)
        panels = std::max(1, static_cast<int>(std::lround(std::log2(p_max / p0))));

    DivergenceScan scan;
    scan.n = n;
    scan.p0 = p0;
    scan.p_max = p_max;
    scan.integrand = integrand;
    scan.edges = geometric_edges(p0, p_max, panels);
    std::function<double(double, double)> w;
    if (integrand == WellIntegrand::Exact)
        w = [n](double x, double p) { return square_well_wigner(n, {x, p}); };
    else
        w = [n](double x, double p) { return leading_order_well(n, x, p); };
    const WellPanels result = well_momentum_panels(w, n, scan.edges, 0.0, rel_tol, 8);
    scan.panel_eta = result.eta;
    scan.converged = result.converged;
    scan.cumulative.assign(1, 0.0);
    for (double v : scan.panel_eta)
        scan.cumulative.push_back(scan.cumulative.back() + v);
    std::vector<double> logp;
    for (double p : scan.edges)
        logp.push_back(std::log(p));
    const Line line = least_squares(logp, scan.cumulative);
    scan.fitted_log_slope = line.slope;
    scan.fit_residual = line.rms;
    return scan;
}

std::vector<double> TailScan::ratios() const
{
    std::vector<double> r;
    for (std::size_t k = 0; k + 1 < contributions.size(); ++k)
        r.push_back(contributions[k] == 0.0 ? 0.0 : contributions[k + 1] / contributions[k]);
    return r;
}

TailScan tail_convergence_scan(int n, const CoarseGrainSpec& cg, double p_start, int octaves,
                               double rel_tol)
{
    StateSpec::square_well(n);
    cg.validate();
    if (!(p_start >= 50.0 * n))
        throw InvalidArgument("tail scan needs p_start >= 50 n (p_start = " + format_exact(p_start)
                              + ")");
    if (octaves < 1)
        throw InvalidArgument("tail scan needs at least one octave");
    TailScan scan;
    scan.n = n;
    scan.cg = cg;
    scan.p_start = p_start;
    scan.edges.push_back(p_start);
    for (int k = 0; k < octaves; ++k)
        scan.edges.push_back(2.0 * scan.edges.back());
    const WellPanels result = well_momentum_panels(n, cg, scan.edges, 0.0, rel_tol, 8);
    for (double v : result.eta)
        scan.contributions.push_back(2.0 * v);
    scan.converged = result.converged;
    return scan;
}

// ---------------------------------------------------------------------------

double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.size() < 2)
        throw InvalidArgument("spearman needs two samples of equal length >= 2");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
                ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k)
                r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const auto N = static_cast<double>(a.size());
    const double mean = (N + 1.0) / 2.0;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - mean) * (rb[i] - mean);
        saa += (ra[i] - mean) * (ra[i] - mean);
        sbb += (rb[i] - mean) * (rb[i] - mean);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "kind,n,m,delta,eta,eta_err,status\n";
    for (const auto& r : rows) {
        out << kind_name(r.kind) << ',' << r.n << ',';
        if (r.m)
            out << *r.m;
        out << ',' << format_exact(r.delta) << ',' << format_exact(r.eta) << ','
            << format_exact(r.eta_err) << ',' << status_name(r.status) << '\n';
    }
}

namespace {

StateKind parse_kind(const std::string& s)
{
    for (auto k : {StateKind::HODiagonal, StateKind::HOOffDiagonal, StateKind::SquareWell})
        if (kind_name(k) == s)
            return k;
    throw ParseError("sweep CSV: unknown kind '" + s + "'");
}

template <class T>
T parse_number(const std::string& s)
{
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("sweep CSV: bad number '" + s + "'");
    return v;
}

} // namespace

std::vector<SweepRow> read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != "kind,n,m,delta,eta,eta_err,status")
        throw ParseError("sweep CSV: missing header");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 7)
            throw ParseError("sweep CSV: expected 7 fields in '" + line + "'");
        SweepRow r;
        r.kind = parse_kind(f[0]);
        r.n = parse_number<int>(f[1]);
        if (!f[2].empty())
            r.m = parse_number<int>(f[2]);
        r.delta = parse_number<double>(f[3]);
        r.eta = parse_number<double>(f[4]);
        r.eta_err = parse_number<double>(f[5]);
        r.status = parse_status(f[6]);
        rows.push_back(r);
    }
    return rows;
}

nlohmann::json to_json(const NmaxFit& fit)
{
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t i = 0; i < fit.deltas.size(); ++i)
        cols.push_back({{"delta", fit.deltas[i]}, {"n_max", fit.nmax[i]}});
    return {{"columns", cols},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"slope_stderr", fit.slope_stderr},
            {"fragile_deltas", fit.fragile_deltas}};
}

nlohmann::json to_json(const DivergenceScan& scan)
{
    nlohmann::json panels = nlohmann::json::array();
    for (std::size_t k = 0; k < scan.panel_eta.size(); ++k)
        panels.push_back({{"p_lo", scan.edges[k]},
                          {"p_hi", scan.edges[k + 1]},
                          {"eta", scan.panel_eta[k]},
                          {"cumulative", scan.cumulative[k + 1]}});
    return {{"n", scan.n},
            {"p0", scan.p0},
            {"p_max", scan.p_max},
            {"integrand", integrand_name(scan.integrand)},
            {"panels", panels},
            {"fitted_log_slope", scan.fitted_log_slope},
            {"fit_residual", scan.fit_residual},
            {"converged", scan.converged}};
}

nlohmann::json to_json(const TailScan& scan)
{
    nlohmann::json octaves = nlohmann::json::array();
    const auto r = scan.ratios();
    for (std::size_t k = 0; k < scan.contributions.size(); ++k) {
        nlohmann::json o = {{"p_lo", scan.edges[k]},
                            {"p_hi", scan.edges[k + 1]},
                            {"eta", scan.contributions[k]}};
        if (k > 0)
            o["ratio"] = r[k - 1];
        octaves.push_back(o);
    }
    return {{"n", scan.n},
            {"delta", scan.cg.delta},
            {"kernel", scan.cg.mass == KernelMass::UnitMass ? "unit" : "paper"},
            {"p_start", scan.p_start},
            {"octaves", octaves},
            {"converged", scan.converged}};
}

} // namespace cgw
