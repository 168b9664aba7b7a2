#pragma once

#include "xs/real.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace xs {

using Rational = boost::multiprecision::cpp_rational;

// exact value of a decimal literal such as "-1.25e-3"
Rational parse_rational(const std::string& s);
std::string rational_to_string(const Rational& q);  // "p/q" or "p"
Real to_real(const Rational& q);                     // at the current default precision

// Strongly convex polynomial external field. Coefficients are kept exactly (rationals) so the
// potential can be materialized at any precision and reflected without rounding.
class Potential {
public:
    Potential() = default;
    // throws ValidationError naming the violated invariant
    static Potential make(std::vector<Rational> coeffs, int digits);
    static Potential from_decimal(const std::vector<std::string>& coeffs, int digits);

    Potential at(int digits) const { return make(exact_, digits); }
    int digits() const { return digits_; }
    int degree() const { return static_cast<int>(exact_.size()) - 1; }
    const std::vector<Rational>& exact() const { return exact_; }
    const std::vector<Real>& coeffs() const { return c_; }
    const Real& convexity_floor() const { return floor_; }
    // canonical text used for cache keys and hashes
    std::string key() const;

    Real value(const Real& x) const;
    Real d1(const Real& x) const;
    Real d2(const Real& x) const;
    Complex d1(const Complex& z) const;
    Complex d2(const Complex& z) const;

    // the unique solution of V'(x) = slope
    Real tilted_argmin(const Real& slope) const;

private:
    std::vector<Rational> exact_;
    int digits_ = 0;
    std::vector<Real> c_, c1_, c2_;
    Real floor_;
};

// V(-x) + lin*x
Potential reflect_potential(const Potential& v, const Rational& lin);
// V(-x) + ((n-1)/n) x
Potential reflect_potential(const Potential& v, int n);

}  // namespace xs
