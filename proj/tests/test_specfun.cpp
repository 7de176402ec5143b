#include "cgwigner/error.hpp"
#include "cgwigner/specfun.hpp"
#include "gen.hpp"

#include <doctest.h>

#include <cmath>

using namespace cgw;

namespace {

// Explicit alternating sum, long double; only trusted for small n and x.
long double explicit_assoc(int n, int a, long double x)
{
    long double sum = 0.0L;
    for (int k = 0; k <= n; ++k) {
        long double binom = 1.0L;
        for (int i = 1; i <= n - k; ++i)
            binom = binom * static_cast<long double>(a + k + i) / static_cast<long double>(i);
        sum += ((k % 2) ? -1.0L : 1.0L) * binom * std::pow(x, k) / std::tgamma(static_cast<long double>(k + 1));
    }
    return sum;
}

} // namespace

TEST_SUITE("specfun")
{
    TEST_CASE("laguerre small cases")
    {
        CHECK(laguerre(0, 7.3) == 1.0);
        CHECK(laguerre(1, 0.0) == 1.0);
        // (x^2 - 4x + 2) / 2 at x = 2
        CHECK(laguerre(2, 2.0) == doctest::Approx(-1.0).epsilon(1e-15).scale(0));
        CHECK(laguerre(1, 3.5) == doctest::Approx(-2.5));
    }

    TEST_CASE("assoc_laguerre small cases")
    {
        CHECK(assoc_laguerre(0, 5, 9.1) == 1.0);
        CHECK(assoc_laguerre(1, 2, 1.0) == doctest::Approx(2.0).epsilon(1e-15).scale(0));
        testing::Gen g(11);
        for (int t = 0; t < 50; ++t) {
            const int n = g.integer(0, 20);
            const double x = g.real(0.0, 30.0);
            CHECK(assoc_laguerre(n, 0, x) == doctest::Approx(laguerre(n, x)).epsilon(1e-13).scale(0));
        }
    }

    TEST_CASE("assoc_laguerre matches the explicit sum")
    {
        testing::Gen g(12);
        for (int t = 0; t < 200; ++t) {
            const int n = g.integer(0, 10);
            const int a = g.integer(0, 6);
            const double x = g.real(0.0, 6.0);
            const double ref = static_cast<double>(explicit_assoc(n, a, x));
            CHECK(assoc_laguerre(n, a, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
        }
    }

    TEST_CASE("laguerre_coeffs")
    {
        CHECK(laguerre_coeffs(0).coefficients == std::vector<Rational>{1});
        CHECK(laguerre_coeffs(1).coefficients == std::vector<Rational>{1, -1});
        CHECK(laguerre_coeffs(2).coefficients == std::vector<Rational>{1, -2, Rational(1, 2)});
        CHECK_THROWS_AS(laguerre_coeffs(65), DegreeTooLarge);
    }

    TEST_CASE("L_n(0) = 1 exactly")
    {
        for (int n = 0; n <= 64; ++n)
            CHECK(laguerre_coeffs(n).evaluate(Rational(0)) == Rational(1));
    }

    TEST_CASE("recurrence agrees with the coefficient sum")
    {
        for (int n = 0; n <= 12; ++n) {
            const PolyCoeffs c = laguerre_coeffs(n);
            for (double x = 0.0; x <= 50.0; x += 0.37) {
                const double exact = to_double(c.evaluate(to_rational(x)));
                // Relative to the size of the leading term so that roots do not dominate.
                const double size = std::pow(x, n) / std::tgamma(n + 1.0);
                CHECK(laguerre(n, x) == doctest::Approx(exact).epsilon(1e-10).scale(1.0 + size));
            }
        }
    }

    TEST_CASE("large-x leading term")
    {
        const double x = 1e4;
        for (int n = 0; n <= 8; ++n) {
            const double lead = ((n % 2) ? -1.0 : 1.0) * std::pow(x, n) / std::tgamma(n + 1.0);
            CHECK(laguerre(n, x) / lead == doctest::Approx(1.0).epsilon(0.01).scale(0));
        }
    }

    TEST_CASE("factorials and rationals")
    {
        CHECK(log_factorial(0) == 0.0);
        CHECK(log_factorial(1) == 0.0);
        for (int n = 2; n <= 40; ++n)
            CHECK(log_factorial(n) == doctest::Approx(std::lgamma(n + 1.0)).epsilon(1e-13).scale(0));
        CHECK(factorial(10) == Rational(3628800));
        CHECK(binomial(10, 3) == Rational(120));
        CHECK(to_rational(0.1) == Rational(1, 10));
        CHECK(to_rational(3.0) == Rational(3));
        CHECK(to_double(Rational(1, 3)) == 1.0 / 3.0);
    }
}
