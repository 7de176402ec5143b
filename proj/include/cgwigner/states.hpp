#pragma once

#include <string>
#include <string_view>

namespace cgw {

/// Point in dimensionless phase space (m = omega = hbar = 1).
struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

enum class StateKind { HODiagonal, HOOffDiagonal, SquareWell };

/// Which Wigner function to evaluate.
///
/// HODiagonal uses n; HOOffDiagonal uses m >= n; SquareWell uses n >= 1
/// with the well occupying x in [0, pi].
struct StateSpec {
    StateKind kind = StateKind::HODiagonal;
    int n = 0;
    int m = 0;

    static StateSpec ho(int n);
    static StateSpec ho_offdiag(int m, int n);
    static StateSpec square_well(int n);

    /// Throws InvalidArgument when the indices violate the kind's domain.
    void validate() const;

    /// Largest quantum number involved (m for off-diagonal states).
    int max_index() const;

    bool operator==(const StateSpec&) const = default;
};

/// Parses "ho:n=4", "ho:m=3,n=1" or "well:n=2". Throws ParseError naming the
/// offending token.
StateSpec parse_state(std::string_view text);
std::string format_state(const StateSpec& spec);
std::string kind_name(StateKind kind);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kWellWidth = kPi;

double ho_wigner(int n, PhasePoint pt);

/// Radial factor R(r) of the off-diagonal function, W_{m,n} = R(r) cos((m-n) theta).
double ho_offdiag_radial(int m, int n, double r);

/// Wigner transform of |m><n| using the full polar angle for theta.
double ho_offdiag_wigner(int m, int n, PhasePoint pt);

/// Infinite square well of width pi, hbar = 1. Zero outside [0, pi].
double square_well_wigner(int n, PhasePoint pt);

/// sin(2 a x) / (4 a), continuous through a = 0.
double half_sinc_term(double a, double x);

double wigner(const StateSpec& spec, PhasePoint pt);

} // namespace cgw
