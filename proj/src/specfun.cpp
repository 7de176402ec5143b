#include "cgwigner/specfun.hpp"

#include "cgwigner/error.hpp"

#include <cmath>
#include <string>

namespace cgw {

bool PolyCoeffs::is_zero() const
{
    for (const auto& c : coefficients)
        if (c != 0)
            return false;
    return true;
}

double PolyCoeffs::operator()(double x) const
{
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        acc = acc * x + to_double(*it);
    return acc;
}

Rational PolyCoeffs::evaluate(const Rational& x) const
{
    Rational acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

void PolyCoeffs::normalize()
{
    while (coefficients.size() > 1 && coefficients.back() == 0)
        coefficients.pop_back();
    if (coefficients.empty())
        coefficients.push_back(0);
}

double laguerre(int n, double x)
{
    return assoc_laguerre(n, 0, x);
}

double assoc_laguerre(int n, int a, double x)
{
    if (n < 0 || a < 0)
        throw InvalidArgument("assoc_laguerre: negative index");
    double prev = 1.0;
    if (n == 0)
        return prev;
    double cur = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

Rational factorial(int n)
{
    Rational r = 1;
    for (int k = 2; k <= n; ++k)
        r *= k;
    return r;
}

Rational binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    boost::multiprecision::cpp_int r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return Rational(r);
}

PolyCoeffs laguerre_coeffs(int n)
{
    if (n < 0)
        throw InvalidArgument("laguerre_coeffs: negative degree");
    if (n > kMaxExactDegree)
        throw DegreeTooLarge("laguerre_coeffs: degree " + std::to_string(n) + " exceeds cap "
                             + std::to_string(kMaxExactDegree));
    PolyCoeffs out;
    out.coefficients.reserve(n + 1);
    // L_n(x) = sum_k (-1)^k C(n,k) x^k / k!
    Rational kfact = 1;
    for (int k = 0; k <= n; ++k) {
        if (k > 0)
            kfact *= k;
        Rational c = binomial(n, k) / kfact;
        out.coefficients.push_back(k % 2 ? Rational(-c) : c);
    }
    return out;
}

double log_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

Rational to_rational(double x)
{
    if (!std::isfinite(x))
        throw InvalidArgument("to_rational: non-finite value");
    const Rational exact(x);
    if (x == 0.0)
        return exact;

    using boost::multiprecision::cpp_int;
    // Continued fraction of the exact binary value; the first convergent
    // that rounds back to x is the simplest candidate.
    cpp_int num = boost::multiprecision::numerator(exact);
    cpp_int den = boost::multiprecision::denominator(exact);
    const bool negative = num < 0;
    if (negative)
        num = -num;
    cpp_int h_prev = 1, h = 0, k_prev = 0, k = 1;
    for (int iter = 0; iter < 200 && den != 0; ++iter) {
        const cpp_int a = num / den;
        const cpp_int rem = num - a * den;
        const cpp_int h_next = a * h_prev + h;
        const cpp_int k_next = a * k_prev + k;
        h = h_prev;
        k = k_prev;
        h_prev = h_next;
        k_prev = k_next;
        Rational cand(h_prev, k_prev);
        if (negative)
            cand = -cand;
        if (to_double(cand) == x)
            return cand;
        num = den;
        den = rem;
    }
    return exact;
}

} // namespace cgw
