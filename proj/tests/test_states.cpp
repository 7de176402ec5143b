#include "cgwigner/error.hpp"
#include "cgwigner/states.hpp"
#include "gen.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace cgw;

namespace {

// Composite Simpson with an even number of intervals.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals)
{
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i)
        sum += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_SUITE("states")
{
    TEST_CASE("oscillator values at the origin")
    {
        CHECK(ho_wigner(0, {0, 0}) == doctest::Approx(2.0 / kPi).epsilon(1e-15).scale(0));
        CHECK(ho_wigner(1, {0, 0}) == doctest::Approx(-2.0 / kPi).epsilon(1e-15).scale(0));
        CHECK(wigner(StateSpec::ho(0), {0, 0}) == doctest::Approx(2.0 / kPi).epsilon(1e-15).scale(0));
    }

    TEST_CASE("oscillator normalization")
    {
        for (int n = 0; n <= 6; ++n) {
            const double total = simpson([n](double r) { return 2.0 * kPi * r * ho_wigner(n, {r, 0.0}); },
                                         0.0, 12.0, 24000);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-8).scale(0));
        }
    }

    TEST_CASE("oscillator radial symmetry")
    {
        testing::Gen g(21);
        for (int t = 0; t < 500; ++t) {
            const int n = g.integer(0, 30);
            const auto [a, b] = g.rotated_pair(6.0);
            CHECK(std::abs(ho_wigner(n, a) - ho_wigner(n, b)) < 1e-12);
        }
    }

    TEST_CASE("oscillator bound |W| <= 2/pi")
    {
        for (int n = 0; n <= 12; ++n)
            for (double x = -6.0; x <= 6.0; x += 0.05)
                for (double p = -6.0; p <= 6.0; p += 0.05)
                    REQUIRE(std::abs(ho_wigner(n, {x, p})) <= 2.0 / kPi + 1e-14);
    }

    TEST_CASE("off-diagonal collapse and parity")
    {
        testing::Gen g(22);
        for (int t = 0; t < 300; ++t) {
            const int n = g.integer(0, 10);
            const int m = n + g.integer(0, 6);
            const PhasePoint pt = g.point(5.0);
            if (m == n)
                CHECK(ho_offdiag_wigner(n, n, pt) == doctest::Approx(ho_wigner(n, pt)).epsilon(1e-12).scale(1e-12));
            const double sign = ((m - n) % 2) ? -1.0 : 1.0;
            CHECK(ho_offdiag_wigner(m, n, {-pt.x, -pt.p}) ==
                  doctest::Approx(sign * ho_offdiag_wigner(m, n, pt)).epsilon(1e-12).scale(1e-12));
        }
        CHECK(wigner(StateSpec::ho_offdiag(2, 2), {1.0, 0.5}) == doctest::Approx(ho_wigner(2, {1.0, 0.5})));
    }

    TEST_CASE("off-diagonal element is traceless")
    {
        // Cartesian midpoint sum over [-10, 10]^2.
        const int cells = 800;
        const double h = 20.0 / cells;
        double total = 0.0;
        for (int i = 0; i < cells; ++i)
            for (int j = 0; j < cells; ++j)
                total += ho_offdiag_wigner(3, 1, {-10.0 + (i + 0.5) * h, -10.0 + (j + 0.5) * h});
        CHECK(std::abs(total * h * h) < 1e-8);
    }

    TEST_CASE("off-diagonal is smooth across the negative x axis")
    {
        for (int k = 1; k <= 5; ++k) {
            const double above = ho_offdiag_wigner(2 + k, 2, {-1.3, 1e-9});
            const double below = ho_offdiag_wigner(2 + k, 2, {-1.3, -1e-9});
            CHECK(above == doctest::Approx(below).epsilon(1e-6).scale(1e-9));
        }
    }

    TEST_CASE("square well support and symmetry")
    {
        testing::Gen g(23);
        for (int t = 0; t < 300; ++t) {
            const int n = g.integer(1, 8);
            // On the right half pi - x is exact, so the mirror pair is too.
            const double x = g.real(kPi / 2.0, kPi);
            const double p = g.real(-40.0, 40.0);
            CHECK(square_well_wigner(n, {x, p}) == square_well_wigner(n, {x, -p}));
            CHECK(square_well_wigner(n, {x, p}) == square_well_wigner(n, {kPi - x, p}));
            CHECK(square_well_wigner(n, {-0.1, p}) == 0.0);
            CHECK(square_well_wigner(n, {kPi + 0.1, p}) == 0.0);
        }
        CHECK(square_well_wigner(1, {-1.0, 0.0}) == 0.0);
    }

    TEST_CASE("square well at the centre")
    {
        // (1/pi)(2/pi) int_{-pi/2}^{pi/2} cos^2 y dy = 1/pi
        CHECK(wigner(StateSpec::square_well(1), {kPi / 2.0, 0.0}) == doctest::Approx(1.0 / kPi).epsilon(1e-14).scale(0));
    }

    TEST_CASE("square well is continuous at the singular momenta")
    {
        for (int n = 1; n <= 4; ++n)
            for (double pstar : {0.0, double(n), -double(n)})
                for (double x = 0.05; x < kPi; x += 0.1) {
                    const double c = square_well_wigner(n, {x, pstar});
                    REQUIRE(std::isfinite(c));
                    CHECK(std::abs(square_well_wigner(n, {x, pstar + 1e-6}) - c) < 1e-5);
                    CHECK(std::abs(square_well_wigner(n, {x, pstar - 1e-6}) - c) < 1e-5);
                }
        const double at = square_well_wigner(2, {0.7, 2.0});
        // The symmetric mean of the neighbours approaches the limit at O(h^2).
        const double h = 1e-5;
        const double limit = 0.5 * (square_well_wigner(2, {0.7, 2.0 + h}) + square_well_wigner(2, {0.7, 2.0 - h}));
        CHECK(std::abs(at - limit) < 1e-8);
    }

    TEST_CASE("half_sinc_term near zero")
    {
        for (double x : {0.1, 1.0, 3.0})
            for (double a : {1e-5, -3e-5, 9.9e-5, 1.01e-4}) {
                const double ref = std::sin(2.0 * a * x) / (4.0 * a);
                CHECK(half_sinc_term(a, x) == doctest::Approx(ref).epsilon(1e-12).scale(0));
            }
        CHECK(half_sinc_term(0.0, 2.0) == 1.0);
    }

    TEST_CASE("square well normalization")
    {
        // Marginal over x for |p| <= P, then the p integral; the x marginal
        // is |phi(p)|^2 ~ 1/p^4, so the tail beyond P is below 1/P^3.
        for (int n = 1; n <= 3; ++n) {
            const double P = 80.0;
            auto marginal = [n](double p) {
                const int cells = 2 * static_cast<int>(8.0 * (std::abs(p) + n)) + 200;
                return simpson([&](double x) { return square_well_wigner(n, {x, p}); }, 0.0, kPi, cells);
            };
            const double total = simpson(marginal, -P, P, 16000);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-4).scale(0));
        }
    }

    TEST_CASE("state strings")
    {
        CHECK(parse_state("ho:n=4") == StateSpec::ho(4));
        CHECK(parse_state("ho:m=3,n=1") == StateSpec::ho_offdiag(3, 1));
        CHECK(parse_state("well:n=2") == StateSpec::square_well(2));
        for (const auto& s : {StateSpec::ho(7), StateSpec::ho_offdiag(5, 2), StateSpec::square_well(3)})
            CHECK(parse_state(format_state(s)) == s);
        CHECK_THROWS_AS(parse_state("ho:n=x"), ParseError);
        CHECK_THROWS_AS(parse_state("box:n=1"), ParseError);
        CHECK_THROWS_AS(parse_state("well:n=0"), Error);
        CHECK_THROWS_AS(parse_state("ho:m=1,n=3"), Error);
        try {
            parse_state("ho:q=3");
            FAIL("no throw");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("q=3") != std::string::npos);
        }
    }
}
