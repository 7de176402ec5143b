#pragma once

#include "cgwigner/smoothing.hpp"

#include <complex>
#include <vector>

namespace cgw {

/// Gaussian-smoothed Wigner function of the n-th square-well eigenstate.
///
/// Smoothing in p turns the Wigner integral into a damped Fourier integral,
///   W_CG(x, p) = (2 / sqrt(pi delta)) int_0^{pi/2} J(x, y) cos(2 p y) dy,
///   J(x, y) = (1/pi) e^{-y^2/delta} int_y^{pi-y} e^{-delta (x-x')^2}
///             (cos 2ny - cos 2nx') dx',
/// where J is entire in y on [0, pi/2]. A Slice holds everything that depends
/// on x only; evaluating it at p is a weighted cosine sum for moderate |p| and
/// a Chebyshev expansion with exact Fourier moments (Filon-type) for large |p|.
class SmoothedWell {
public:
    static constexpr int kChebyshevDegree = 128;
    /// Above this angular frequency omega = |p| pi / 2 the moment recurrence
    /// is used; it is forward-stable while omega exceeds the degree.
    static constexpr double kFilonOmega = 150.0;
    /// Below this |p| the direct sum uses a quarter of the nodes.
    static constexpr double kCoarseMomentum = 24.0;

    class Slice {
    public:
        double x() const { return x_; }
        double operator()(double p) const;
        double direct(double p) const;
        double filon(double p) const;
        /// Values at start + i * step, i < count; uniform grids below the
        /// Filon threshold reuse cosines by angle rotation.
        std::vector<double> sample(double start, double step, std::size_t count) const;
        /// Chebyshev coefficients of J(x, y(t)), y = pi (1 + t) / 4.
        const std::vector<double>& chebyshev() const { return cheb_; }

    private:
        friend class SmoothedWell;
        double x_ = 0.0;
        double scale_ = 0.0;
        std::vector<double> nodes_;
        std::vector<double> weighted_;
        std::vector<double> coarse_nodes_;
        std::vector<double> coarse_weighted_;
        std::vector<double> cheb_;
    };

    SmoothedWell(int n, const CoarseGrainSpec& cg);

    int n() const { return n_; }
    const CoarseGrainSpec& coarse_grain() const { return cg_; }

    Slice slice(double x) const;
    double operator()(PhasePoint pt) const { return slice(pt.x)(pt.p); }

    /// Distance outside [0, pi] beyond which |W_CG| < 1e-16.
    double x_reach() const;

    /// J(x, y) evaluated directly (used by tests and slice construction).
    double kernel_profile(double x, double y) const;

private:
    int n_;
    CoarseGrainSpec cg_;
};

/// Chebyshev moments int_{-1}^{1} T_k(t) e^{i omega t} dt, k = 0..degree,
/// by forward recurrence. Accurate when omega > degree.
std::vector<std::complex<double>> chebyshev_fourier_moments(int degree, double omega);

} // namespace cgw
