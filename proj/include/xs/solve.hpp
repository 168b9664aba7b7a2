#pragma once

#include "xs/linalg.hpp"
#include "xs/real.hpp"

#include <functional>
#include <vector>

namespace xs {

using VecMap = std::function<std::vector<Real>(const std::vector<Real>&)>;
using JacMap = std::function<Matrix(const std::vector<Real>&)>;

// Newton's method until ||F||_inf <= newton_tol. Steps that increase the residual are halved
// a few times before being accepted anyway.
std::vector<Real> newton_solve(const VecMap& f, const JacMap& jac, std::vector<Real> x0,
                               const PrecisionContext& ctx);

using ComplexMap = std::function<Complex(const Complex&)>;

Complex complex_newton(const ComplexMap& f, const ComplexMap& df, Complex z0, const PrecisionContext& ctx);
// derivative by a central difference at step ~10^(-digits/3)
Complex complex_newton(const ComplexMap& f, Complex z0, const PrecisionContext& ctx);

}  // namespace xs
