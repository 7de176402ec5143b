#include "cgwigner/smoothed_well.hpp"

#include "cgwigner/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace cgw {

namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

constexpr int kDirectPanels = 32;

/// erf(b) - erf(a) for a <= b without cancellation in the tails.
double erf_diff(double a, double b)
{
    if (a >= 0.0)
        return std::erfc(a) - std::erfc(b);
    if (b <= 0.0)
        return std::erfc(-b) - std::erfc(-a);
    return std::erf(b) - std::erf(a);
}

template <class F>
double gauss20(F&& f, double a, double b)
{
    return Gauss20::integrate(f, a, b);
}

/// Antiderivative of e^{-delta (x - t)^2} cos(2 n t) on [0, pi].
class CosineGaussianPrimitive {
public:
    CosineGaussianPrimitive(int n, double delta, double x)
        : n_(n), delta_(delta), x_(x)
    {
        double h = std::min(0.5 / std::sqrt(delta), kPi / 8.0);
        if (n > 0)
            h = std::min(h, 0.8 / n);
        panels_ = static_cast<int>(std::ceil(kPi / h));
        h_ = kPi / panels_;
        cumulative_.assign(panels_ + 1, 0.0);
        for (int i = 0; i < panels_; ++i)
            cumulative_[i + 1] = cumulative_[i] + gauss20([this](double t) { return integrand(t); }, i * h_, (i + 1) * h_);
    }

    double operator()(double t) const
    {
        t = std::clamp(t, 0.0, kPi);
        int idx = static_cast<int>(t / h_);
        idx = std::clamp(idx, 0, panels_ - 1);
        const double a = idx * h_;
        if (t == a)
            return cumulative_[idx];
        return cumulative_[idx] + gauss20([this](double u) { return integrand(u); }, a, t);
    }

private:
    double integrand(double t) const
    {
        return std::exp(-delta_ * (x_ - t) * (x_ - t)) * std::cos(2.0 * n_ * t);
    }

    int n_;
    double delta_;
    double x_;
    int panels_ = 1;
    double h_ = kPi;
    std::vector<double> cumulative_;
};

} // namespace

std::vector<std::complex<double>> chebyshev_fourier_moments(int degree, double omega)
{
    using cd = std::complex<double>;
    std::vector<cd> moments(degree + 1);
    if (omega == 0.0) {
        // int T_k = 2/(1-k^2) for even k, 0 for odd k.
        for (int k = 0; k <= degree; ++k)
            moments[k] = (k % 2) ? 0.0 : 2.0 / (1.0 - double(k) * k);
        return moments;
    }
    const cd iw(0.0, omega);
    const cd ep = std::exp(iw);
    const cd em = std::exp(-iw);
    // I_k = B_k/(i w) - (k/(i w)) V_{k-1}, V_j = int U_j e^{i w t},
    // B_k = e^{i w} - (-1)^k e^{-i w}, V_k = V_{k-2} + 2 I_k.
    std::vector<cd> v(degree + 1);
    moments[0] = 2.0 * std::sin(omega) / omega;
    v[0] = moments[0];
    if (degree >= 1) {
        moments[1] = (ep + em) / iw - moments[0] / iw;
        v[1] = 2.0 * moments[1];
    }
    for (int k = 2; k <= degree; ++k) {
        const cd bk = ep - ((k % 2) ? -1.0 : 1.0) * em;
        moments[k] = bk / iw - (double(k) / iw) * v[k - 1];
        v[k] = v[k - 2] + 2.0 * moments[k];
    }
    return moments;
}

SmoothedWell::SmoothedWell(int n, const CoarseGrainSpec& cg)
    : n_(n), cg_(cg)
{
    StateSpec::square_well(n);
    cg_.validate();
}

double SmoothedWell::x_reach() const
{
    return std::sqrt(std::log(1e16) / cg_.delta);
}

double SmoothedWell::kernel_profile(double x, double y) const
{
    y = std::abs(y);
    if (y >= kPi / 2.0)
        return 0.0;
    const double d = cg_.delta;
    const int n = n_;
    const double c2ny = std::cos(2.0 * n * y);
    const double lo = y;
    const double hi = kPi - y;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * (std::sqrt(d) + n) / 0.5)));
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i)
        total += gauss20(
            [&](double t) { return std::exp(-d * (x - t) * (x - t)) * (c2ny - std::cos(2.0 * n * t)); },
            lo + i * h, lo + (i + 1) * h);
    return std::exp(-y * y / d) / kPi * total;
}

SmoothedWell::Slice SmoothedWell::slice(double x) const
{
    const double d = cg_.delta;
    const double sd = std::sqrt(d);
    const CosineGaussianPrimitive primitive(n_, d, x);
    const double half_root = 0.5 * std::sqrt(kPi / d);

    auto profile = [&](double y) {
        if (y >= kPi / 2.0)
            return 0.0;
        const double gauss_mass = half_root * erf_diff(sd * (y - x), sd * (kPi - y - x));
        const double cos_part = primitive(kPi - y) - primitive(y);
        return std::exp(-y * y / d) / kPi * (std::cos(2.0 * n_ * y) * gauss_mass - cos_part);
    };

    Slice s;
    s.x_ = x;
    s.scale_ = 2.0 / std::sqrt(kPi * d) * cg_.mass_factor();

    // Composite Gauss-Legendre nodes for the direct cosine sum.
    const auto& abscissa = Gauss20::abscissa();
    const auto& weights = Gauss20::weights();
    auto build = [&](int panels, std::vector<double>& nodes, std::vector<double>& weighted) {
        const double h = (kPi / 2.0) / panels;
        nodes.reserve(panels * 20);
        weighted.reserve(panels * 20);
        auto push = [&](double y, double w) {
            nodes.push_back(y);
            weighted.push_back(w * profile(y));
        };
        for (int panel = 0; panel < panels; ++panel) {
            const double mid = (panel + 0.5) * h;
            const double half = 0.5 * h;
            for (std::size_t k = 0; k < abscissa.size(); ++k) {
                const double a = abscissa[k] * half;
                if (a == 0.0) {
                    push(mid, weights[k] * half);
                } else {
                    push(mid - a, weights[k] * half);
                    push(mid + a, weights[k] * half);
                }
            }
        }
    };
    build(kDirectPanels, s.nodes_, s.weighted_);
    build(kDirectPanels / 4, s.coarse_nodes_, s.coarse_weighted_);

    // Chebyshev coefficients on the Lobatto points.
    constexpr int N = kChebyshevDegree;
    std::vector<double> samples(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double t = std::cos(kPi * j / N);
        samples[j] = profile(kPi / 4.0 * (1.0 + t));
    }
    s.cheb_.assign(N + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= N; ++j) {
            const double w = (j == 0 || j == N) ? 0.5 : 1.0;
            acc += w * samples[j] * std::cos(kPi * double(j) * k / N);
        }
        acc *= 2.0 / N;
        if (k == 0 || k == N)
            acc *= 0.5;
        s.cheb_[k] = acc;
    }
    return s;
}

double SmoothedWell::Slice::direct(double p) const
{
    const bool coarse = std::abs(p) <= kCoarseMomentum;
    const auto& nodes = coarse ? coarse_nodes_ : nodes_;
    const auto& weighted = coarse ? coarse_weighted_ : weighted_;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += weighted[i] * std::cos(2.0 * p * nodes[i]);
    return scale_ * acc;
}

double SmoothedWell::Slice::filon(double p) const
{
    // Same recurrence as chebyshev_fourier_moments, summed on the fly.
    using cd = std::complex<double>;
    const double omega = std::abs(p) * kPi / 2.0;
    const cd inv_iw(0.0, -1.0 / omega);
    const cd ep = std::exp(cd(0.0, omega));
    const cd em = std::conj(ep);
    const std::size_t N = cheb_.size() - 1;
    cd moment = 2.0 * std::sin(omega) / omega;
    cd acc = cheb_[0] * moment;
    cd v_prev = moment;
    moment = (ep + em) * inv_iw - moment * inv_iw;
    acc += cheb_[1] * moment;
    cd v_cur = 2.0 * moment;
    const cd b_even = (ep - em) * inv_iw;
    const cd b_odd = (ep + em) * inv_iw;
    for (std::size_t k = 2; k <= N; ++k) {
        moment = ((k % 2) ? b_odd : b_even) - (static_cast<double>(k) * inv_iw) * v_cur;
        acc += cheb_[k] * moment;
        const cd v_next = v_prev + 2.0 * moment;
        v_prev = v_cur;
        v_cur = v_next;
    }
    acc *= ep;
    return scale_ * (kPi / 4.0) * acc.real();
}

std::vector<double> SmoothedWell::Slice::sample(double start, double step, std::size_t count) const
{
    std::vector<double> out(count, 0.0);
    if (count == 0)
        return out;
    const double last = start + step * static_cast<double>(count - 1);
    const double reach = std::max(std::abs(start), std::abs(last));
    const bool same_sign = start * last >= 0.0;
    if (reach * kPi / 2.0 >= kFilonOmega || !same_sign) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = (*this)(start + step * static_cast<double>(i));
        return out;
    }
    // Runs that straddle kCoarseMomentum use the fine node set throughout.
    const bool coarse = reach <= kCoarseMomentum;
    const auto& nodes = coarse ? coarse_nodes_ : nodes_;
    const auto& weighted = coarse ? coarse_weighted_ : weighted_;
    const std::size_t m = nodes.size();
    std::vector<double> c(m), sn(m), cr(m), sr(m);
    constexpr std::size_t kReseed = 64;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % kReseed == 0) {
            const double p = start + step * static_cast<double>(i);
            for (std::size_t k = 0; k < m; ++k) {
                c[k] = std::cos(2.0 * p * nodes[k]);
                sn[k] = std::sin(2.0 * p * nodes[k]);
                if (i == 0) {
                    cr[k] = std::cos(2.0 * step * nodes[k]);
                    sr[k] = std::sin(2.0 * step * nodes[k]);
                }
            }
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            acc += weighted[k] * c[k];
            const double cn = c[k] * cr[k] - sn[k] * sr[k];
            sn[k] = sn[k] * cr[k] + c[k] * sr[k];
            c[k] = cn;
        }
        out[i] = scale_ * acc;
    }
    return out;
}

double SmoothedWell::Slice::operator()(double p) const
{
    return std::abs(p) * kPi / 2.0 >= kFilonOmega ? filon(p) : direct(p);
}

} // namespace cgw
