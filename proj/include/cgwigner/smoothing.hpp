#pragma once

#include "cgwigner/specfun.hpp"
#include "cgwigner/states.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cgw {

/// Normalization of the Gaussian kernel exp[-delta((x-x')^2 + (p-p')^2)].
enum class KernelMass {
    PaperUnnormalized, ///< bare exponential, total mass pi/delta
    UnitMass,          ///< scaled by delta/pi
};

struct CoarseGrainSpec {
    double delta = 2.0;
    KernelMass mass = KernelMass::PaperUnnormalized;

    void validate() const;
    /// Integral of the kernel over the plane.
    double kernel_mass() const;
    /// Factor that turns the bare exponential into the selected kernel.
    double mass_factor() const;
};

/// prefactor * exp(-decay * s) * poly(s), s = x^2 + p^2.
///
/// poly is monic for every n, so prefactor carries the leading
/// coefficient of the smoothed function.
struct ClosedFormCG {
    int n = 0;
    CoarseGrainSpec cg;
    double decay = 0.0;
    Rational decay_exact;
    PolyCoeffs poly;
    double prefactor = 0.0;
};

/// Exact Gaussian smoothing of the n-th oscillator eigenstate by
/// term-by-term Gaussian moments of L_n(4 r'^2). delta is converted with
/// to_rational, so decimal inputs give exact rational coefficients.
/// Throws DegreeTooLarge for n > 64.
ClosedFormCG analytic_cg_ho(int n, const CoarseGrainSpec& cg);

double eval_closed_form(const ClosedFormCG& cf, PhasePoint pt);

/// Radial profile of the raw or smoothed n-th oscillator Wigner function as
/// a function of s = x^2 + p^2.
///
/// Smoothing with the Gaussian kernel keeps the Laguerre form: the result is
/// A exp(-c s) rho^n L_n(kappa s). The product rho^k L_k is carried through
/// a rescaled three-term recurrence so that the delta = 2 limit (rho -> 0,
/// kappa -> infinity) and large n stay finite. This is the path used in
/// quadrature; ClosedFormCG is the exact reference for moderate n.
class FockProfile {
public:
    explicit FockProfile(int n, std::optional<CoarseGrainSpec> cg = std::nullopt);

    double operator()(double s) const;
    double value(PhasePoint pt) const { return (*this)(pt.x * pt.x + pt.p * pt.p); }

    int n() const { return n_; }
    double decay() const { return decay_; }
    const std::optional<CoarseGrainSpec>& coarse_grain() const { return cg_; }

    /// Upper bound on pi * integral_{s > S} |profile(s)| ds, i.e. the
    /// absolute volume outside the disk of radius sqrt(S).
    double tail_bound(double S) const;

private:
    int n_;
    std::optional<CoarseGrainSpec> cg_;
    double amplitude_ = 0.0;
    double decay_ = 0.0;
    double rho_ = 0.0;
    double rho_kappa_ = 0.0;
    std::vector<double> abs_poly_; // |coefficients| of rho^n L_n(kappa s) in s
};

/// Radial factor of the smoothed off-diagonal function |m><n|.
///
/// Rotational covariance of the Gaussian kernel means the smoothed function
/// is R~(r) cos((m-n) theta) with
///   R~(r) = 2 pi mass_factor integral r' R(r') exp(-delta (r-r')^2) e^{-z} I_k(z) dr',
/// z = 2 delta r r'. The r' integral is done by composite Gauss-Legendre.
class SmoothedOffDiagonal {
public:
    SmoothedOffDiagonal(int m, int n, const CoarseGrainSpec& cg);

    double radial(double r) const;
    double operator()(PhasePoint pt) const;

    /// Radius beyond which the raw radial factor is below 1e-17 of its peak.
    double raw_extent() const { return raw_extent_; }

private:
    int m_;
    int n_;
    CoarseGrainSpec cg_;
    double raw_extent_ = 0.0;
};

/// exp(-z) I_k(z) for z >= 0.
double scaled_bessel_i(int k, double z);

/// Rectangular cell-centred sampling geometry.
struct GridGeometry {
    double x0 = 0.0; ///< lower x edge
    double p0 = 0.0; ///< lower p edge
    double dx = 0.0;
    double dp = 0.0;
    std::size_t nx = 0;
    std::size_t np = 0;

    static GridGeometry from_bounds(double x_lo, double x_hi, double p_lo, double p_hi,
                                    std::size_t nx, std::size_t np);

    double x_at(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx; }
    double p_at(std::size_t j) const { return p0 + (static_cast<double>(j) + 0.5) * dp; }
    double x_hi() const { return x0 + static_cast<double>(nx) * dx; }
    double p_hi() const { return p0 + static_cast<double>(np) * dp; }
    std::size_t size() const { return nx * np; }

    void validate() const;
    bool operator==(const GridGeometry&) const = default;
};

/// Samples on a GridGeometry, stored x-major: values[i * np + j] is (x_i, p_j).
struct WignerGrid {
    GridGeometry geometry;
    std::vector<double> values;

    double& at(std::size_t i, std::size_t j) { return values[i * geometry.np + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * geometry.np + j]; }

    double cell_area() const { return geometry.dx * geometry.dp; }
    double integral() const;
    double min_value() const;
    /// Cells [i0, i1) x [j0, j1) as a new grid.
    WignerGrid crop(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1) const;
};

/// Largest dx (dp) that resolves the state's oscillations on a grid that
/// reaches |p| (|x|) = extent: pi / (8 (extent + n)).
double max_resolved_spacing(const StateSpec& spec, double conjugate_extent);

/// Cell-centred samples of wigner(spec, .). Throws ResolutionTooCoarse when
/// dx > pi/(8(p_max + n)) or dp > pi/(8(x_max + n)).
WignerGrid grid_sample(const StateSpec& spec, const GridGeometry& geometry);

/// Discrete Gaussian smoothing with zero padding; separable two-pass sum.
/// Throws KernelUnderresolved if 1/sqrt(delta) spans fewer than 4 cells.
WignerGrid grid_convolve(const WignerGrid& grid, const CoarseGrainSpec& cg);

/// Reference implementation: direct 2D sum over the disk where the kernel
/// exceeds 1e-14. Quadratic in the kernel radius; used to check grid_convolve.
WignerGrid grid_convolve_direct(const WignerGrid& grid, const CoarseGrainSpec& cg);

/// Kernel radius (in units of x) where exp(-delta u^2) drops below 1e-14.
double kernel_radius(double delta);

} // namespace cgw
