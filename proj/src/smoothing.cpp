#include "cgwigner/smoothing.hpp"

#include "cgwigner/error.hpp"
#include "cgwigner/states.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cgw {

void CoarseGrainSpec::validate() const
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw InvalidArgument("coarse-graining delta must be positive and finite");
}

double CoarseGrainSpec::kernel_mass() const
{
    return mass == KernelMass::UnitMass ? 1.0 : kPi / delta;
}

double CoarseGrainSpec::mass_factor() const
{
    return mass == KernelMass::UnitMass ? delta / kPi : 1.0;
}

// ---------------------------------------------------------------------------
// Closed form

namespace {

Rational ipow(const Rational& base, int e)
{
    Rational r = 1;
    for (int i = 0; i < e; ++i)
        r *= base;
    return r;
}

} // namespace

ClosedFormCG analytic_cg_ho(int n, const CoarseGrainSpec& cg)
{
    cg.validate();
    const PolyCoeffs lag = laguerre_coeffs(n); // throws DegreeTooLarge
    const Rational delta = to_rational(cg.delta);
    const Rational a = delta + 2;
    const Rational t = 1 / a;           // E|r' - mu|^2 of the shifted Gaussian
    const Rational mu2 = delta * delta / (a * a); // |mu|^2 per unit s

    // Completing the square leaves exp(-2 delta s / (delta + 2)) times the
    // Gaussian average of L_n(4|r'|^2) about mu = delta r / a, with
    //   E|r'|^{2k} = k! t^k L_k(-|mu|^2 / t) = sum_i C(k,i) k!/i! t^{k-i} |mu|^{2i}.
    std::vector<Rational> poly(n + 1, Rational(0));
    Rational four_k = 1;
    for (int k = 0; k <= n; ++k) {
        const Rational lk = lag.coefficients[k] * four_k;
        four_k *= 4;
        if (lk == 0)
            continue;
        const Rational kfact = factorial(k);
        Rational ifact = 1;
        for (int i = 0; i <= k; ++i) {
            if (i > 0)
                ifact *= i;
            Rational term = lk * binomial(k, i) * kfact / ifact;
            term *= ipow(t, k - i);
            term *= ipow(mu2, i);
            poly[i] += term;
        }
    }
    // Prefactor: (2 (-1)^n / pi) * (pi / a) from the Gaussian normalisation.
    const Rational base = Rational(n % 2 ? -2 : 2) / a;
    const Rational lead = poly.back();
    ClosedFormCG out;
    out.n = n;
    out.cg = cg;
    out.decay_exact = 2 * delta / a;
    out.decay = to_double(out.decay_exact);
    out.poly.coefficients.reserve(n + 1);
    for (auto& c : poly)
        out.poly.coefficients.push_back(c / lead);
    out.prefactor = to_double(base * lead) * cg.mass_factor();
    return out;
}

double eval_closed_form(const ClosedFormCG& cf, PhasePoint pt)
{
    const double s = pt.x * pt.x + pt.p * pt.p;
    return cf.prefactor * std::exp(-cf.decay * s) * cf.poly(s);
}

// ---------------------------------------------------------------------------
// Stable Laguerre-form profile

FockProfile::FockProfile(int n, std::optional<CoarseGrainSpec> cg)
    : n_(n), cg_(cg)
{
    if (n < 0)
        throw InvalidArgument("FockProfile: n must be >= 0");
    // sigma is the ordering parameter of the smoothed function: 0 for the raw
    // Wigner function, -2/delta after smoothing (-1 is the Husimi limit).
    double sigma = 0.0;
    double mass = 1.0;
    if (cg_) {
        cg_->validate();
        sigma = -2.0 / cg_->delta;
        mass = cg_->kernel_mass();
    }
    amplitude_ = 2.0 / (kPi * (1.0 - sigma)) * mass;
    decay_ = 2.0 / (1.0 - sigma);
    rho_ = (sigma + 1.0) / (sigma - 1.0);
    rho_kappa_ = -4.0 / ((1.0 - sigma) * (1.0 - sigma));

    // |coefficient of s^j| in rho^n L_n(kappa s) = C(n,j) |rho|^{n-j} |rho kappa|^j / j!
    abs_poly_.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
        if (rho_ == 0.0 && j < n) {
            abs_poly_[j] = 0.0;
            continue;
        }
        double log_c = log_factorial(n) - log_factorial(j) - log_factorial(n - j)
                       - log_factorial(j) + j * std::log(std::abs(rho_kappa_));
        if (n - j > 0)
            log_c += (n - j) * std::log(std::abs(rho_));
        abs_poly_[j] = std::exp(log_c);
    }
}

double FockProfile::operator()(double s) const
{
    double prev = 1.0;
    double cur = prev;
    if (n_ > 0) {
        cur = rho_ - rho_kappa_ * s;
        for (int k = 1; k < n_; ++k) {
            const double next =
                (((2.0 * k + 1.0) * rho_ - rho_kappa_ * s) * cur - k * rho_ * rho_ * prev) / (k + 1.0);
            prev = cur;
            cur = next;
        }
    }
    return amplitude_ * std::exp(-decay_ * s) * cur;
}

double FockProfile::tail_bound(double S) const
{
    // pi * amp * sum_j |a_j| Gamma(j+1, c S) / c^{j+1}
    const double c = decay_;
    double total = 0.0;
    for (int j = 0; j <= n_; ++j) {
        if (abs_poly_[j] == 0.0)
            continue;
        const double a = j + 1.0;
        const double q = boost::math::gamma_q(a, c * S);
        if (q == 0.0)
            continue;
        const double log_term =
            std::log(abs_poly_[j]) + std::log(q) + std::lgamma(a) - a * std::log(c);
        total += std::exp(log_term);
    }
    return kPi * amplitude_ * total;
}

// ---------------------------------------------------------------------------
// Off-diagonal smoothing by radial convolution

double scaled_bessel_i(int k, double z)
{
    if (z < 0.0)
        throw InvalidArgument("scaled_bessel_i: negative argument");
    if (z == 0.0)
        return k == 0 ? 1.0 : 0.0;
    if (z < 600.0)
        return std::cyl_bessel_i(static_cast<double>(k), z) * std::exp(-z);
    // Hankel asymptotic series; terms shrink fast for k << z.
    const double mu = 4.0 * k * k;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < 30; ++j) {
        const double odd = 2.0 * j - 1.0;
        term *= -(mu - odd * odd) / (j * 8.0 * z);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum))
            break;
    }
    return sum / std::sqrt(2.0 * kPi * z);
}

SmoothedOffDiagonal::SmoothedOffDiagonal(int m, int n, const CoarseGrainSpec& cg)
    : m_(m), n_(n), cg_(cg)
{
    StateSpec::ho_offdiag(m, n);
    cg_.validate();
    // Outermost node of L_n^k(4 r^2) sits below r^2 = (2n + k + 1)/2 roughly;
    // beyond that the Gaussian wins. Scan outward until |R| is negligible.
    double peak = 0.0;
    for (double r = 0.0; r < 60.0; r += 0.01)
        peak = std::max(peak, std::abs(ho_offdiag_radial(m, n, r)));
    double r = std::sqrt(m + n + 1.0);
    while (r < 60.0) {
        double local = 0.0;
        for (double q = r; q < r + 1.0; q += 0.01)
            local = std::max(local, std::abs(ho_offdiag_radial(m, n, q)));
        if (local < 1e-17 * peak)
            break;
        r += 0.5;
    }
    raw_extent_ = r;
}

double SmoothedOffDiagonal::radial(double r) const
{
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const int k = m_ - n_;
    const double delta = cg_.delta;
    const double reach = std::sqrt(40.0 / delta);
    const double lo = std::max(0.0, r - reach);
    const double hi = std::min(raw_extent_, r + reach);
    if (hi <= lo)
        return 0.0;
    const double h_target =
        std::min(0.3 / std::sqrt(delta), 0.5 / std::sqrt(2.0 * (m_ + n_) + 2.0));
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / h_target)));
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + i * h;
        total += Rule::integrate(
            [&](double rp) {
                const double z = 2.0 * delta * r * rp;
                return rp * ho_offdiag_radial(m_, n_, rp)
                       * std::exp(-delta * (r - rp) * (r - rp)) * scaled_bessel_i(k, z);
            },
            a, a + h);
    }
    return 2.0 * kPi * cg_.mass_factor() * total;
}

double SmoothedOffDiagonal::operator()(PhasePoint pt) const
{
    const int k = m_ - n_;
    const double r = std::hypot(pt.x, pt.p);
    if (k > 0 && r == 0.0)
        return 0.0;
    const double angular = k == 0 ? 1.0 : std::cos(k * std::atan2(pt.p, pt.x));
    return radial(r) * angular;
}

// ---------------------------------------------------------------------------
// Grids

GridGeometry GridGeometry::from_bounds(double x_lo, double x_hi, double p_lo, double p_hi,
                                       std::size_t nx, std::size_t np)
{
    GridGeometry g;
    g.x0 = x_lo;
    g.p0 = p_lo;
    g.nx = nx;
    g.np = np;
    g.dx = nx ? (x_hi - x_lo) / static_cast<double>(nx) : 0.0;
    g.dp = np ? (p_hi - p_lo) / static_cast<double>(np) : 0.0;
    g.validate();
    return g;
}

void GridGeometry::validate() const
{
    if (nx == 0 || np == 0)
        throw InvalidArgument("grid needs at least one cell per axis");
    if (!(dx > 0.0) || !(dp > 0.0) || !std::isfinite(dx) || !std::isfinite(dp))
        throw InvalidArgument("grid cell sizes must be positive");
    if (!std::isfinite(x0) || !std::isfinite(p0))
        throw InvalidArgument("grid origin must be finite");
}

double WignerGrid::integral() const
{
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum * cell_area();
}

double WignerGrid::min_value() const
{
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

WignerGrid WignerGrid::crop(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const
{
    if (i0 >= i1 || j0 >= j1 || i1 > geometry.nx || j1 > geometry.np)
        throw InvalidArgument("crop window outside the grid");
    WignerGrid out;
    out.geometry = geometry;
    out.geometry.x0 = geometry.x0 + static_cast<double>(i0) * geometry.dx;
    out.geometry.p0 = geometry.p0 + static_cast<double>(j0) * geometry.dp;
    out.geometry.nx = i1 - i0;
    out.geometry.np = j1 - j0;
    out.values.reserve(out.geometry.size());
    for (std::size_t i = i0; i < i1; ++i)
        for (std::size_t j = j0; j < j1; ++j)
            out.values.push_back(at(i, j));
    return out;
}

double max_resolved_spacing(const StateSpec& spec, double conjugate_extent)
{
    return kPi / (8.0 * (conjugate_extent + spec.max_index()));
}

WignerGrid grid_sample(const StateSpec& spec, const GridGeometry& geometry)
{
    spec.validate();
    geometry.validate();
    const double p_max = std::max(std::abs(geometry.p0), std::abs(geometry.p_hi()));
    const double x_max = std::max(std::abs(geometry.x0), std::abs(geometry.x_hi()));
    const double dx_limit = max_resolved_spacing(spec, p_max);
    const double dp_limit = max_resolved_spacing(spec, x_max);
    constexpr double slack = 1.0 + 1e-12;
    if (geometry.dx > dx_limit * slack)
        throw ResolutionTooCoarse("dx = " + std::to_string(geometry.dx) + " exceeds "
                                  + std::to_string(dx_limit) + " for " + format_state(spec));
    if (geometry.dp > dp_limit * slack)
        throw ResolutionTooCoarse("dp = " + std::to_string(geometry.dp) + " exceeds "
                                  + std::to_string(dp_limit) + " for " + format_state(spec));

    WignerGrid g;
    g.geometry = geometry;
    g.values.resize(geometry.size());
    for (std::size_t i = 0; i < geometry.nx; ++i) {
        const double x = geometry.x_at(i);
        for (std::size_t j = 0; j < geometry.np; ++j)
            g.values[i * geometry.np + j] = wigner(spec, {x, geometry.p_at(j)});
    }
    return g;
}

double kernel_radius(double delta)
{
    return std::sqrt(std::log(1e14) / delta);
}

namespace {

void check_kernel_resolution(const GridGeometry& geo, const CoarseGrainSpec& cg)
{
    cg.validate();
    const double width = 1.0 / std::sqrt(cg.delta);
    if (width < 4.0 * geo.dx || width < 4.0 * geo.dp)
        throw KernelUnderresolved("kernel width " + std::to_string(width)
                                  + " spans fewer than 4 cells");
}

std::vector<double> kernel_taps(double delta, double step)
{
    const double radius = kernel_radius(delta);
    const auto count = static_cast<std::size_t>(std::floor(radius / step));
    std::vector<double> taps(count + 1);
    for (std::size_t d = 0; d <= count; ++d) {
        const double u = static_cast<double>(d) * step;
        taps[d] = std::exp(-delta * u * u);
    }
    return taps;
}

} // namespace

WignerGrid grid_convolve(const WignerGrid& grid, const CoarseGrainSpec& cg)
{
    const auto& geo = grid.geometry;
    check_kernel_resolution(geo, cg);
    const auto kx = kernel_taps(cg.delta, geo.dx);
    const auto kp = kernel_taps(cg.delta, geo.dp);
    const auto nx = static_cast<std::ptrdiff_t>(geo.nx);
    const auto np = static_cast<std::ptrdiff_t>(geo.np);
    const auto rx = static_cast<std::ptrdiff_t>(kx.size()) - 1;
    const auto rp = static_cast<std::ptrdiff_t>(kp.size()) - 1;

    // Pass 1 along p.
    std::vector<double> tmp(geo.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
        const double* row = grid.values.data() + i * np;
        double* out = tmp.data() + i * np;
        for (std::ptrdiff_t j = 0; j < np; ++j) {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - rp);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(np - 1, j + rp);
            double acc = 0.0;
            for (std::ptrdiff_t jj = lo; jj <= hi; ++jj)
                acc += kp[static_cast<std::size_t>(std::abs(jj - j))] * row[jj];
            out[j] = acc;
        }
    }
    // Pass 2 along x.
    WignerGrid result;
    result.geometry = geo;
    result.values.assign(geo.size(), 0.0);
    const double scale = geo.dx * geo.dp * cg.mass_factor();
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - rx);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(nx - 1, i + rx);
        double* out = result.values.data() + i * np;
        for (std::ptrdiff_t ii = lo; ii <= hi; ++ii) {
            const double w = kx[static_cast<std::size_t>(std::abs(ii - i))];
            const double* src = tmp.data() + ii * np;
            for (std::ptrdiff_t j = 0; j < np; ++j)
                out[j] += w * src[j];
        }
        for (std::ptrdiff_t j = 0; j < np; ++j)
            out[j] *= scale;
    }
    return result;
}

WignerGrid grid_convolve_direct(const WignerGrid& grid, const CoarseGrainSpec& cg)
{
    const auto& geo = grid.geometry;
    check_kernel_resolution(geo, cg);
    const double radius = kernel_radius(cg.delta);
    const auto nx = static_cast<std::ptrdiff_t>(geo.nx);
    const auto np = static_cast<std::ptrdiff_t>(geo.np);
    const auto rx = static_cast<std::ptrdiff_t>(std::floor(radius / geo.dx));
    const auto rp = static_cast<std::ptrdiff_t>(std::floor(radius / geo.dp));
    const double cutoff = std::exp(-cg.delta * radius * radius);

    WignerGrid result;
    result.geometry = geo;
    result.values.assign(geo.size(), 0.0);
    const double scale = geo.dx * geo.dp * cg.mass_factor();
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
        for (std::ptrdiff_t j = 0; j < np; ++j) {
            double acc = 0.0;
            for (std::ptrdiff_t di = -rx; di <= rx; ++di) {
                const std::ptrdiff_t ii = i + di;
                if (ii < 0 || ii >= nx)
                    continue;
                const double u = static_cast<double>(di) * geo.dx;
                for (std::ptrdiff_t dj = -rp; dj <= rp; ++dj) {
                    const std::ptrdiff_t jj = j + dj;
                    if (jj < 0 || jj >= np)
                        continue;
                    const double v = static_cast<double>(dj) * geo.dp;
                    const double k = std::exp(-cg.delta * (u * u + v * v));
                    if (k < cutoff)
                        continue;
                    acc += k * grid.values[ii * np + jj];
                }
            }
            result.values[i * np + j] = acc * scale;
        }
    }
    return result;
}

} // namespace cgw
