#include "cgwigner/negativity.hpp"

#include "cgwigner/error.hpp"
#include "cgwigner/smoothed_well.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace cgw {

void QuadratureSpec::validate() const
{
    if (cutoff && !(*cutoff > 0.0 && std::isfinite(*cutoff)))
        throw InvalidArgument("cutoff must be positive");
    if (abs_tolerance && !(*abs_tolerance > 0.0 && std::isfinite(*abs_tolerance)))
        throw InvalidArgument("abs_tolerance must be positive");
    if (max_refinement_levels < 1)
        throw InvalidArgument("max_refinement_levels must be >= 1");
}

double default_tolerance(const StateSpec& spec)
{
    if (spec.kind == StateKind::HODiagonal
        || (spec.kind == StateKind::HOOffDiagonal && spec.m == spec.n))
        return 1e-6;
    return 1e-4;
}

std::string status_name(NegativityStatus status)
{
    switch (status) {
    case NegativityStatus::Converged:
        return "Converged";
    case NegativityStatus::NonConvergent:
        return "NonConvergent";
    case NegativityStatus::MaxRefinement:
        return "MaxRefinement";
    }
    return "?";
}

NegativityStatus parse_status(const std::string& text)
{
    for (auto s : {NegativityStatus::Converged, NegativityStatus::NonConvergent,
                   NegativityStatus::MaxRefinement})
        if (status_name(s) == text)
            return s;
    throw ParseError("unknown status '" + text + "'");
}

nlohmann::json to_json(const NegativityResult& result)
{
    nlohmann::json j;
    j["eta"] = result.eta;
    j["error_estimate"] = result.error_estimate;
    if (result.truncation_bound)
        j["truncation_bound"] = *result.truncation_bound;
    else
        j["truncation_bound"] = "Unbounded";
    j["status"] = status_name(result.status);
    if (result.log_slope)
        j["log_slope"] = *result.log_slope;
    return j;
}

// ---------------------------------------------------------------------------
// Sign-aware 1D quadrature

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

int sign_of(double v)
{
    return (v > 0.0) - (v < 0.0);
}

std::vector<double> bracket_roots(const std::function<double(double)>& f,
                                  const std::vector<double>& xs, const std::vector<double>& vs,
                                  const SignedOptions& opt)
{
    const bool exact = !opt.sampler;
    const boost::math::tools::eps_tolerance<double> tolerance(44);
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (vs[i] == 0.0 && i > 0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (sign_of(vs[i]) * sign_of(vs[i + 1]) >= 0)
            continue;
        if (std::max(std::abs(vs[i]), std::abs(vs[i + 1])) < opt.noise_floor)
            continue;
        const double lo = xs[i];
        const double hi = xs[i + 1];
        std::pair<double, double> bracket;
        try {
            std::uintmax_t iters = 80;
            bracket = boost::math::tools::toms748_solve(f, lo, hi, vs[i], vs[i + 1], tolerance, iters);
        } catch (const std::exception&) {
            if (exact)
                throw;
            // Batch samples are rounded differently from f; recheck the ends.
            const double fa = f(lo);
            const double fb = f(hi);
            if (sign_of(fa) * sign_of(fb) >= 0)
                continue;
            std::uintmax_t iters = 80;
            bracket = boost::math::tools::toms748_solve(f, lo, hi, fa, fb, tolerance, iters);
        }
        roots.push_back(0.5 * (bracket.first + bracket.second));
    }
    return roots;
}

std::size_t count_sign_changes(const std::vector<double>& vs, const SignedOptions& opt)
{
    std::size_t count = 0;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        if (vs[i] == 0.0 && i > 0) {
            ++count;
            continue;
        }
        if (sign_of(vs[i]) * sign_of(vs[i + 1]) < 0
            && std::max(std::abs(vs[i]), std::abs(vs[i + 1])) >= opt.noise_floor)
            ++count;
    }
    return count;
}

// Pieces between consecutive roots keep one sign.
SignedIntegral integrate_pieces(const std::function<double(double)>& f, double a, double b,
                                const std::vector<double>& roots, const std::vector<double>& xs,
                                const std::vector<double>& vs, const SignedOptions& opt)
{
    SignedIntegral out;
    double lo = a;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i <= roots.size(); ++i) {
        const double hi = i < roots.size() ? roots[i] : b;
        if (hi > lo) {
            while (cursor < xs.size() && xs[cursor] <= lo)
                ++cursor;
            // The largest interior sample gives the sign of the piece.
            double probe = 0.0;
            for (std::size_t c = cursor; c < xs.size() && xs[c] < hi; ++c)
                if (std::abs(vs[c]) > std::abs(probe))
                    probe = vs[c];
            if (probe == 0.0)
                probe = f(0.5 * (lo + hi));
            const double peak = std::abs(probe);
            if (peak > 0.0 && peak < opt.noise_floor) {
                out.error += opt.noise_floor * (hi - lo);
            } else if (probe < 0.0 || opt.need_positive) {
                double err = 0.0;
                const double v = Kronrod::integrate(f, lo, hi, 3, 1e-9, &err);
                if (v < 0.0)
                    out.negative -= v;
                else
                    out.positive += v;
                out.error += err;
            }
        }
        lo = hi;
    }
    return out;
}

} // namespace

SignedIntegral integrate_signed(const std::function<double(double)>& f, double a, double b,
                                const SignedOptions& opt)
{
    if (!(b > a))
        return {};
    const std::size_t samples = std::max<std::size_t>(opt.samples, 2);
    std::vector<double> xs(samples + 1), vs(samples + 1);
    for (std::size_t i = 0; i <= samples; ++i)
        xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(samples);
    if (opt.sampler) {
        vs = opt.sampler(a, (b - a) / static_cast<double>(samples), samples + 1);
    } else {
        for (std::size_t i = 0; i <= samples; ++i)
            vs[i] = f(xs[i]);
    }
    auto roots = bracket_roots(f, xs, vs, opt);
    SignedIntegral current = integrate_pieces(f, a, b, roots, xs, vs, opt);

    for (int level = 1; level <= opt.max_levels; ++level) {
        const std::size_t coarse = xs.size() - 1;
        const std::size_t fine = 2 * coarse;
        std::vector<double> fx(fine + 1), fv(fine + 1);
        for (std::size_t i = 0; i <= coarse; ++i) {
            fx[2 * i] = xs[i];
            fv[2 * i] = vs[i];
        }
        const double step = (b - a) / static_cast<double>(coarse);
        std::vector<double> odd;
        if (opt.sampler)
            odd = opt.sampler(a + 0.5 * step, step, coarse);
        for (std::size_t i = 0; i < coarse; ++i) {
            const double x = a + (b - a) * static_cast<double>(2 * i + 1) / static_cast<double>(fine);
            fx[2 * i + 1] = x;
            fv[2 * i + 1] = opt.sampler ? odd[i] : f(x);
        }
        xs.swap(fx);
        vs.swap(fv);
        // Same number of sign changes on the finer mesh: nothing was missed.
        if (count_sign_changes(vs, opt) == roots.size())
            return current;
        auto fine_roots = bracket_roots(f, xs, vs, opt);
        SignedIntegral next = integrate_pieces(f, a, b, fine_roots, xs, vs, opt);
        const double diff =
            std::abs(next.negative - current.negative) + std::abs(next.positive - current.positive);
        roots.swap(fine_roots);
        next.error += diff;
        current = next;
        if (diff <= 0.5 * opt.tol)
            return current;
    }
    current.converged = false;
    return current;
}

// ---------------------------------------------------------------------------
// Oscillator states

NegativityResult negativity_radial(const FockProfile& f, const QuadratureSpec& q)
{
    q.validate();
    const double tol = q.abs_tolerance.value_or(1e-6);
    double S = 0.0;
    if (q.cutoff) {
        S = *q.cutoff * *q.cutoff;
    } else {
        S = 1.0;
        while (f.tail_bound(S) > 1e-2 * tol && S < 1e5)
            S *= 1.2;
    }
    const double R = std::sqrt(S);
    SignedOptions opt;
    opt.samples = 16 * static_cast<std::size_t>(f.n() + 8);
    opt.tol = tol / (2.0 * kPi);
    opt.max_levels = q.max_refinement_levels;
    opt.need_positive = false;
    const auto si = integrate_signed([&](double r) { return f(r * r) * r; }, 0.0, R, opt);
    NegativityResult res;
    res.eta = 2.0 * kPi * si.negative;
    res.error_estimate = 2.0 * kPi * si.error;
    res.truncation_bound = f.tail_bound(S);
    res.status = si.converged ? NegativityStatus::Converged : NegativityStatus::MaxRefinement;
    return res;
}

namespace {

double raw_offdiag_extent(int m, int n)
{
    double peak = 0.0;
    for (double r = 0.0; r < 60.0; r += 0.01)
        peak = std::max(peak, std::abs(ho_offdiag_radial(m, n, r)));
    double r = std::sqrt(m + n + 1.0);
    while (r < 60.0) {
        double local = 0.0;
        for (double s = r; s < r + 1.0; s += 0.01)
            local = std::max(local, std::abs(ho_offdiag_radial(m, n, s)));
        if (local < 1e-17 * peak)
            break;
        r += 0.5;
    }
    return r;
}

// For k = m - n >= 1 the angular factor cos(k theta) has negative part of
// mean 1/pi, so eta = 2 int |R(r)| r dr.
NegativityResult offdiag_negativity(int m, int n, const std::optional<CoarseGrainSpec>& cg,
                                    const QuadratureSpec& q, double tol)
{
    std::function<double(double)> radial;
    std::optional<SmoothedOffDiagonal> smoothed;
    double R = 0.0;
    if (cg) {
        smoothed.emplace(m, n, *cg);
        radial = [&](double r) { return smoothed->radial(r); };
        R = smoothed->raw_extent() + std::sqrt(40.0 / cg->delta);
    } else {
        radial = [m, n](double r) { return ho_offdiag_radial(m, n, r); };
        R = raw_offdiag_extent(m, n);
    }
    if (q.cutoff)
        R = *q.cutoff;
    auto g = [&](double r) { return radial(r) * r; };
    SignedOptions opt;
    opt.samples = 16 * static_cast<std::size_t>(m + 8);
    opt.tol = tol / 2.0;
    opt.max_levels = q.max_refinement_levels;
    const auto si = integrate_signed(g, 0.0, R, opt);
    NegativityResult res;
    res.eta = 2.0 * (si.negative + si.positive);
    res.error_estimate = 2.0 * si.error;
    // Shell just beyond the cutoff; the radial factor decays like a Gaussian.
    double err = 0.0;
    const double shell = Kronrod::integrate([&](double r) { return std::abs(g(r)); }, R, 1.5 * R + 2.0,
                                            4, 1e-6, &err);
    res.truncation_bound = 2.0 * shell;
    res.status = si.converged ? NegativityStatus::Converged : NegativityStatus::MaxRefinement;
    return res;
}

// ---------------------------------------------------------------------------
// Square well

using Gauss10 = boost::math::quadrature::gauss<double, 10>;

/// Composite 10-point Gauss-Legendre over [a, b] of a vector-valued
/// integrand, doubling the panel count until the summed change is below
/// abs_tol or every component moves by less than rel_tol of itself.
template <class F>
void composite_vector(F&& f, double a, double b, std::size_t panels, double abs_tol,
                      double rel_tol, int max_levels, std::vector<double>& value,
                      std::vector<double>& error, bool& converged)
{
    const auto& abscissa = Gauss10::abscissa();
    const auto& weights = Gauss10::weights();
    auto run = [&](std::size_t m) {
        std::vector<double> acc;
        const double h = (b - a) / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double mid = a + (static_cast<double>(i) + 0.5) * h;
            const double half = 0.5 * h;
            for (std::size_t k = 0; k < abscissa.size(); ++k) {
                const double u = abscissa[k] * half;
                for (double t : {mid - u, mid + u}) {
                    const std::vector<double> v = f(t);
                    if (acc.empty())
                        acc.assign(v.size(), 0.0);
                    for (std::size_t c = 0; c < v.size(); ++c)
                        acc[c] += weights[k] * half * v[c];
                    if (u == 0.0)
                        break;
                }
            }
        }
        return acc;
    };
    value = run(panels);
    error.assign(value.size(), 0.0);
    converged = false;
    for (int level = 1; level <= max_levels; ++level) {
        panels *= 2;
        auto next = run(panels);
        double total = 0.0;
        bool relative_ok = rel_tol > 0.0;
        for (std::size_t c = 0; c < next.size(); ++c) {
            error[c] = std::abs(next[c] - value[c]);
            total += error[c];
            relative_ok = relative_ok && error[c] <= rel_tol * std::abs(next[c]);
        }
        value.swap(next);
        if (total <= abs_tol || relative_ok) {
            converged = true;
            return;
        }
    }
}

WellPanels raw_well_panels(const std::function<double(double, double)>& w, int n,
                           const std::vector<double>& edges, double tol, double rel_tol,
                           int max_levels)
{
    WellPanels out;
    out.edges = edges;
    const std::size_t K = edges.size() - 1;
    out.eta.assign(K, 0.0);
    out.error.assign(K, 0.0);
    const double panel_tol = tol / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double a = edges[k];
        const double b = edges[k + 1];
        bool inner_ok = true;
        // Negative volume of the p-slice over the whole well (mirror symmetry).
        auto slice = [&](double p) {
            SignedOptions opt;
            opt.samples = static_cast<std::size_t>(4.0 * (std::abs(p) + n)) + 32;
            opt.tol = 1e-3 * panel_tol;
            opt.max_levels = max_levels;
            opt.need_positive = false;
            const auto si = integrate_signed([&](double x) { return w(x, p); }, 0.0, kPi / 2.0, opt);
            inner_ok = inner_ok && si.converged;
            return std::vector<double>{2.0 * si.negative};
        };
        // Far from the bulk the slice volume varies on the scale of p itself.
        const double width = std::max(4.0, a / 8.0);
        const auto panels = static_cast<std::size_t>(std::ceil((b - a) / width));
        std::vector<double> value, error;
        bool ok = false;
        composite_vector(slice, a, b, std::max<std::size_t>(panels, 1), panel_tol, rel_tol,
                         max_levels, value, error, ok);
        out.eta[k] = value[0];
        out.error[k] = error[0];
        out.converged = out.converged && ok && inner_ok;
    }
    return out;
}

WellPanels smoothed_well_panels(int n, const CoarseGrainSpec& cg, const std::vector<double>& edges,
                                double tol, double rel_tol, int max_levels)
{
    const SmoothedWell well(n, cg);
    WellPanels out;
    out.edges = edges;
    const std::size_t K = edges.size() - 1;
    bool inner_ok = true;
    const double x_lo = -well.x_reach();
    // Mesh magnitudes below this cannot move any panel by more than tol / 1000.
    const double noise_floor = 1e-3 * tol / (4.0 * (kPi / 2.0 - x_lo) * (edges.back() - edges.front()));
    // Per-slice negative volume of every momentum panel.
    auto slice = [&](double x) {
        const auto s = well.slice(x);
        std::vector<double> v(K);
        for (std::size_t k = 0; k < K; ++k) {
            const double a = edges[k];
            const double b = edges[k + 1];
            SignedOptions opt;
            opt.samples = static_cast<std::size_t>((b - a) / 0.25) + 16;
            opt.tol = 1e-3 * tol;
            opt.max_levels = max_levels;
            opt.need_positive = false;
            opt.noise_floor = noise_floor;
            opt.sampler = [&s](double start, double step, std::size_t count) {
                return s.sample(start, step, count);
            };
            const auto si = integrate_signed(std::cref(s), a, b, opt);
            inner_ok = inner_ok && si.converged;
            v[k] = 2.0 * si.negative;
        }
        return v;
    };
    const double h0 = std::min({0.5, 1.0 / std::sqrt(cg.delta), 1.5 / (n + 1.0)});
    const auto panels = static_cast<std::size_t>(std::ceil((kPi / 2.0 - x_lo) / h0));
    bool ok = false;
    composite_vector(slice, x_lo, kPi / 2.0, panels, tol, rel_tol, max_levels, out.eta, out.error,
                     ok);
    out.converged = ok && inner_ok;
    return out;
}

void check_edges(const std::vector<double>& edges)
{
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) || edges.front() < 0.0)
        throw InvalidArgument("momentum panel edges must be sorted, nonnegative, at least two");
}

double fit_log_slope(const std::vector<double>& p, const std::vector<double>& cumulative)
{
    const std::size_t N = p.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = std::log(p[i]);
        sx += x;
        sy += cumulative[i];
        sxx += x * x;
        sxy += x * cumulative[i];
    }
    const double d = N * sxx - sx * sx;
    return d == 0.0 ? 0.0 : (N * sxy - sx * sy) / d;
}

NegativityResult well_negativity(int n, const std::optional<CoarseGrainSpec>& cg,
                                 const QuadratureSpec& q, double tol)
{
    constexpr int kMaxOctaves = 30;
    double P = 0.0;
    if (q.cutoff)
        P = *q.cutoff;
    else if (cg)
        P = 2.0 * (n + 4.0 + 4.0 / std::sqrt(cg->delta));
    else
        P = 4.0 * n + 8.0;

    auto panels = [&](const std::vector<double>& edges) {
        if (cg)
            return smoothed_well_panels(n, *cg, edges, tol, 0.0, q.max_refinement_levels);
        return raw_well_panels([n](double x, double p) { return square_well_wigner(n, {x, p}); }, n,
                               edges, tol, 0.0, q.max_refinement_levels);
    };

    // Bulk panel and the first octaves, then further octaves until one
    // contributes less than tol.
    std::vector<double> edges{0.0, P, 2.0 * P, 4.0 * P};
    WellPanels all = panels(edges);
    while (static_cast<int>(all.eta.size()) - 1 < kMaxOctaves && 2.0 * all.eta.back() >= tol) {
        const std::vector<double> more{all.edges.back(), 2.0 * all.edges.back()};
        const WellPanels extra = panels(more);
        for (std::size_t k = 0; k < extra.eta.size(); ++k) {
            all.edges.push_back(extra.edges[k + 1]);
            all.eta.push_back(extra.eta[k]);
            all.error.push_back(extra.error[k]);
        }
        all.converged = all.converged && extra.converged;
    }

    NegativityResult res;
    for (std::size_t k = 0; k < all.eta.size(); ++k) {
        res.eta += 2.0 * all.eta[k];
        res.error_estimate += 2.0 * all.error[k];
    }
    const std::size_t K = all.eta.size();
    const double last = 2.0 * all.eta[K - 1];
    const double prev = 2.0 * all.eta[K - 2];
    const double ratio = prev > 0.0 ? last / prev : 0.0;
    const bool decaying = last == 0.0 || ratio < 0.9;
    if (!decaying) {
        res.status = NegativityStatus::NonConvergent;
    } else {
        res.truncation_bound = last * std::max(1.0, ratio / (1.0 - ratio));
        res.status = (last < tol && all.converged) ? NegativityStatus::Converged
                                                   : NegativityStatus::MaxRefinement;
    }
    if (!cg) {
        std::vector<double> ps, cum;
        double acc = 0.0;
        for (std::size_t k = 1; k < K; ++k) {
            acc += 2.0 * all.eta[k];
            ps.push_back(all.edges[k + 1]);
            cum.push_back(acc);
        }
        res.log_slope = fit_log_slope(ps, cum);
    }
    return res;
}

} // namespace

WellPanels well_momentum_panels(int n, const std::optional<CoarseGrainSpec>& cg,
                                const std::vector<double>& edges, double abs_tol, double rel_tol,
                                int max_levels)
{
    StateSpec::square_well(n);
    if (cg)
        cg->validate();
    check_edges(edges);
    if (cg)
        return smoothed_well_panels(n, *cg, edges, abs_tol, rel_tol, max_levels);
    return raw_well_panels([n](double x, double p) { return square_well_wigner(n, {x, p}); }, n,
                           edges, abs_tol, rel_tol, max_levels);
}

WellPanels well_momentum_panels(const std::function<double(double, double)>& w, int n,
                                const std::vector<double>& edges, double abs_tol, double rel_tol,
                                int max_levels)
{
    check_edges(edges);
    return raw_well_panels(w, n, edges, abs_tol, rel_tol, max_levels);
}

// ---------------------------------------------------------------------------

NegativityResult negativity_grid(const WignerGrid& grid)
{
    const auto& g = grid.geometry;
    g.validate();
    // Every 2x2 sublattice of a reflection-symmetric state carries exactly a
    // quarter of the sum, so the coarse comparison uses the three diagonal
    // 3x3 sublattices instead. The kink of neg_part along the zero set makes
    // the error irregular in h, hence the undivided worst difference.
    double fine = 0.0;
    std::array<double, 3> coarse{};
    double border = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i)
        for (std::size_t j = 0; j < g.np; ++j) {
            const double v = grid.at(i, j);
            const double neg = neg_part(v);
            fine += neg;
            if (i % 3 == j % 3)
                coarse[i % 3] += neg;
            if (i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.np)
                border += std::abs(v);
        }
    const double area = grid.cell_area();
    NegativityResult res;
    res.eta = fine * area;
    for (double c : coarse)
        res.error_estimate = std::max(res.error_estimate, std::abs(fine - 9.0 * c) * area);
    res.truncation_bound = border * area;
    res.status = NegativityStatus::Converged;
    return res;
}

NegativityResult negativity_adaptive(const StateSpec& spec, const std::optional<CoarseGrainSpec>& cg,
                                     const QuadratureSpec& q)
{
    spec.validate();
    q.validate();
    if (cg)
        cg->validate();
    const double tol = q.abs_tolerance.value_or(default_tolerance(spec));
    QuadratureSpec qq = q;
    qq.abs_tolerance = tol;
    switch (spec.kind) {
    case StateKind::HODiagonal:
        return negativity_radial(FockProfile(spec.n, cg), qq);
    case StateKind::HOOffDiagonal:
        if (spec.m == spec.n)
            return negativity_radial(FockProfile(spec.n, cg), qq);
        return offdiag_negativity(spec.m, spec.n, cg, qq, tol);
    case StateKind::SquareWell:
        return well_negativity(spec.n, cg, qq, tol);
    }
    throw InvalidArgument("unknown state kind");
}

} // namespace cgw
