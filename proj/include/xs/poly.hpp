#pragma once

#include "xs/real.hpp"

#include <optional>
#include <vector>

namespace xs {

// coefficients are ascending: c[0] + c[1] x + ...
Real horner(const std::vector<Real>& c, const Real& x);
Complex horner(const std::vector<Real>& c, const Complex& z);
// value and derivative
std::pair<Real, Real> horner2(const std::vector<Real>& c, const Real& x);

// Root of c in (lo, hi) given a sign change; safeguarded Newton (bisection fallback).
Real bracketed_root(const std::vector<Real>& c, Real lo, Real hi, const PrecisionContext& ctx);

// Real roots of c, one per bracket between consecutive `separators` (plus two outer brackets
// out to the Cauchy bound). Empty optional if some bracket has no sign change.
std::optional<std::vector<Real>> roots_between(const std::vector<Real>& c, const std::vector<Real>& separators,
                                               const PrecisionContext& ctx);

// All complex roots by Aberth-Ehrlich simultaneous iteration.
std::vector<Complex> aberth_roots(const std::vector<Real>& c, const PrecisionContext& ctx);

// Chebyshev interpolant on [a,b] through first-kind nodes.
class Chebyshev {
public:
    Chebyshev() = default;
    // nodes x_k = mid + half*cos(pi (k+1/2)/N), k = 0..N-1
    static std::vector<Real> nodes(const Real& a, const Real& b, int count);
    Chebyshev(const Real& a, const Real& b, const std::vector<Real>& values_at_nodes);
    Real operator()(const Real& x) const;
    const std::vector<Real>& coefficients() const { return coef_; }
    // drop trailing coefficients below tol * max |c_j|
    void trim(const Real& tol);

private:
    Real a_, b_;
    std::vector<Real> coef_;
};

}  // namespace xs
