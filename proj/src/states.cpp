#include "cgwigner/states.hpp"

#include "cgwigner/error.hpp"
#include "cgwigner/specfun.hpp"

#include <charconv>
#include <cmath>
#include <optional>

namespace cgw {

StateSpec StateSpec::ho(int n)
{
    StateSpec s{StateKind::HODiagonal, n, n};
    s.validate();
    return s;
}

StateSpec StateSpec::ho_offdiag(int m, int n)
{
    StateSpec s{StateKind::HOOffDiagonal, n, m};
    s.validate();
    return s;
}

StateSpec StateSpec::square_well(int n)
{
    StateSpec s{StateKind::SquareWell, n, n};
    s.validate();
    return s;
}

void StateSpec::validate() const
{
    switch (kind) {
    case StateKind::HODiagonal:
        if (n < 0)
            throw InvalidArgument("HO state needs n >= 0");
        break;
    case StateKind::HOOffDiagonal:
        if (n < 0 || m < n)
            throw InvalidArgument("off-diagonal HO state needs m >= n >= 0");
        break;
    case StateKind::SquareWell:
        if (n < 1)
            throw InvalidArgument("square-well state needs n >= 1");
        break;
    }
}

int StateSpec::max_index() const
{
    return kind == StateKind::HOOffDiagonal ? m : n;
}

std::string kind_name(StateKind kind)
{
    switch (kind) {
    case StateKind::HODiagonal:
        return "ho";
    case StateKind::HOOffDiagonal:
        return "ho_offdiag";
    case StateKind::SquareWell:
        return "well";
    }
    return "?";
}

std::string format_state(const StateSpec& spec)
{
    switch (spec.kind) {
    case StateKind::HODiagonal:
        return "ho:n=" + std::to_string(spec.n);
    case StateKind::HOOffDiagonal:
        return "ho:m=" + std::to_string(spec.m) + ",n=" + std::to_string(spec.n);
    case StateKind::SquareWell:
        return "well:n=" + std::to_string(spec.n);
    }
    return {};
}

namespace {

int parse_index(std::string_view token, std::string_view value)
{
    int out = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || value.empty())
        throw ParseError("bad state token '" + std::string(token) + "'");
    return out;
}

} // namespace

StateSpec parse_state(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("bad state '" + std::string(text) + "': expected family:key=value");
    const auto family = text.substr(0, colon);
    auto rest = text.substr(colon + 1);

    std::optional<int> n, m;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto token = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = token.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("bad state token '" + std::string(token) + "'");
        const auto key = token.substr(0, eq);
        const int v = parse_index(token, token.substr(eq + 1));
        if (key == "n" && !n)
            n = v;
        else if (key == "m" && !m)
            m = v;
        else
            throw ParseError("bad state token '" + std::string(token) + "'");
    }
    if (!n)
        throw ParseError("bad state '" + std::string(text) + "': missing n");

    try {
        if (family == "ho")
            return m ? StateSpec::ho_offdiag(*m, *n) : StateSpec::ho(*n);
        if (family == "well") {
            if (m)
                throw ParseError("bad state token 'm': square well takes only n");
            return StateSpec::square_well(*n);
        }
    } catch (const InvalidArgument& e) {
        throw ParseError("bad state '" + std::string(text) + "': " + e.what());
    }
    throw ParseError("bad state token '" + std::string(family) + "'");
}

double ho_wigner(int n, PhasePoint pt)
{
    const double s = pt.x * pt.x + pt.p * pt.p;
    const double sign = (n % 2) ? -1.0 : 1.0;
    return 2.0 * sign / kPi * std::exp(-2.0 * s) * laguerre(n, 4.0 * s);
}

double ho_offdiag_radial(int m, int n, double r)
{
    const int k = m - n;
    const double s = r * r;
    const double sign = (n % 2) ? -1.0 : 1.0;
    // sqrt(n!/m!) (2r)^k e^{-2s}, assembled in log space so large m stays finite.
    double radial;
    if (k == 0) {
        radial = std::exp(-2.0 * s);
    } else if (r == 0.0) {
        return 0.0;
    } else {
        const double log_mag = 0.5 * (log_factorial(n) - log_factorial(m))
                               + k * std::log(2.0 * r) - 2.0 * s;
        radial = std::exp(log_mag);
    }
    return 2.0 * sign / kPi * radial * assoc_laguerre(n, k, 4.0 * s);
}

double ho_offdiag_wigner(int m, int n, PhasePoint pt)
{
    const int k = m - n;
    if (k == 0)
        return ho_wigner(n, pt);
    const double r = std::hypot(pt.x, pt.p);
    if (r == 0.0)
        return 0.0;
    const double theta = std::atan2(pt.p, pt.x);
    return ho_offdiag_radial(m, n, r) * std::cos(k * theta);
}

double half_sinc_term(double a, double x)
{
    if (std::abs(a) < 1e-4)
        return x / 2.0 - a * a * x * x * x / 3.0;
    return std::sin(2.0 * a * x) / (4.0 * a);
}

double square_well_wigner(int n, PhasePoint pt)
{
    if (pt.x < 0.0 || pt.x > kWellWidth)
        return 0.0;
    const double x = pt.x <= kWellWidth / 2.0 ? pt.x : kWellWidth - pt.x;
    const double p = pt.p;
    const double bracket = half_sinc_term(p + n, x) + half_sinc_term(p - n, x)
                           - std::cos(2.0 * n * x) * 2.0 * half_sinc_term(p, x);
    return 2.0 / (kPi * kPi) * bracket;
}

double wigner(const StateSpec& spec, PhasePoint pt)
{
    switch (spec.kind) {
    case StateKind::HODiagonal:
        return ho_wigner(spec.n, pt);
    case StateKind::HOOffDiagonal:
        return ho_offdiag_wigner(spec.m, spec.n, pt);
    case StateKind::SquareWell:
        return square_well_wigner(spec.n, pt);
    }
    return 0.0;
}

} // namespace cgw
