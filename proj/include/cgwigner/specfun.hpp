#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace cgw {

using Rational = boost::multiprecision::cpp_rational;

/// Highest degree accepted by the exact-coefficient path.
inline constexpr int kMaxExactDegree = 64;

/// Dense polynomial with exact rational coefficients; coefficients[k]
/// multiplies argument^k.
struct PolyCoeffs {
    std::vector<Rational> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    bool is_zero() const;

    /// Horner evaluation in double precision. Fine for low degrees; the
    /// alternating Laguerre-type coefficients lose accuracy for large
    /// degree and large argument.
    double operator()(double x) const;
    Rational evaluate(const Rational& x) const;

    /// Drops trailing zero coefficients (keeps at least one entry).
    void normalize();
};

/// L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

/// Generalized Laguerre L_n^a(x) by the three-term recurrence.
double assoc_laguerre(int n, int a, double x);

/// Exact monomial coefficients of L_n. Throws DegreeTooLarge for n > 64.
PolyCoeffs laguerre_coeffs(int n);

/// ln(n!)
double log_factorial(int n);

Rational binomial(int n, int k);
Rational factorial(int n);

/// Simplest rational within a relative 4 ulp of x (continued-fraction
/// convergents), falling back to the exact binary value of x. Decimal
/// inputs such as 0.1 come back as 1/10.
Rational to_rational(double x);

double to_double(const Rational& r);

} // namespace cgw
