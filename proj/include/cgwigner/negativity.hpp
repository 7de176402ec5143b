#pragma once

#include "cgwigner/smoothing.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cgw {

struct QuadratureSpec {
    /// Radial cutoff R for oscillator states or bulk momentum cutoff P for
    /// the well. Chosen from the state when absent.
    std::optional<double> cutoff;
    /// Chosen by default_tolerance() when absent.
    std::optional<double> abs_tolerance;
    int max_refinement_levels = 8;

    void validate() const;
};

/// 1e-6 for oscillator diagonal states, 1e-4 for everything else.
double default_tolerance(const StateSpec& spec);

enum class NegativityStatus { Converged, NonConvergent, MaxRefinement };

std::string status_name(NegativityStatus status);
NegativityStatus parse_status(const std::string& text);

struct NegativityResult {
    double eta = 0.0;
    double error_estimate = 0.0;
    /// Absolute volume left outside the integration domain; empty means
    /// unbounded.
    std::optional<double> truncation_bound;
    NegativityStatus status = NegativityStatus::Converged;
    /// Slope of the cumulative value against ln p over the momentum panels
    /// (unsmoothed well only).
    std::optional<double> log_slope;
};

nlohmann::json to_json(const NegativityResult& result);

/// max(-w, 0)
inline double neg_part(double w)
{
    return w < 0.0 ? -w : 0.0;
}

/// Integrals of the negative and positive parts of f over [a, b].
struct SignedIntegral {
    double negative = 0.0;
    double positive = 0.0;
    double error = 0.0;
    bool converged = true;
};

/// Optional batch evaluation of f at start + i * step, i < count. Its values
/// only steer root bracketing; roots and integrals always use f itself.
using UniformSampler = std::function<std::vector<double>(double start, double step, std::size_t count)>;

struct SignedOptions {
    std::size_t samples = 64; ///< initial mesh intervals
    double tol = 1e-10;       ///< accepted change when the root set moves
    int max_levels = 8;       ///< mesh doublings
    /// Sign changes between samples below this magnitude are ignored.
    double noise_floor = 0.0;
    bool need_positive = true;
    UniformSampler sampler;
};

/// Sign-aware quadrature: samples f on a uniform mesh, brackets every sign
/// change with TOMS 748, and integrates each constant-sign piece with
/// adaptive Gauss-Kronrod. The mesh is doubled until the root set is stable
/// or the result moves by less than tol.
SignedIntegral integrate_signed(const std::function<double(double)>& f, double a, double b,
                                const SignedOptions& opt);

/// eta = pi * int_0^{R^2} neg(f(s)) ds for a radially symmetric profile.
NegativityResult negativity_radial(const FockProfile& f, const QuadratureSpec& q);

/// Cell sum of neg(values) dx dp. The error estimate is the largest gap to
/// the diagonal sub-grids at three times the spacing.
NegativityResult negativity_grid(const WignerGrid& grid);

/// Negativity of the raw (cg empty) or smoothed Wigner function of spec.
NegativityResult negativity_adaptive(const StateSpec& spec,
                                     const std::optional<CoarseGrainSpec>& cg,
                                     const QuadratureSpec& q = {});

/// Per-panel negativity of the square well over x in R and momenta
/// edges[k] <= p < edges[k+1] (positive p only). The raw function is used
/// when cg is empty.
struct WellPanels {
    std::vector<double> edges;
    std::vector<double> eta;
    std::vector<double> error;
    bool converged = true;
};

/// Refinement stops once the summed change is below abs_tol or every panel
/// changes by less than rel_tol of its value.
WellPanels well_momentum_panels(int n, const std::optional<CoarseGrainSpec>& cg,
                                const std::vector<double>& edges, double abs_tol, double rel_tol,
                                int max_levels);

/// Same for an arbitrary pointwise integrand w(x, p) that is mirror
/// symmetric about x = pi/2 and vanishes outside [0, pi].
WellPanels well_momentum_panels(const std::function<double(double, double)>& w, int n,
                                const std::vector<double>& edges, double abs_tol, double rel_tol,
                                int max_levels);

} // namespace cgw
