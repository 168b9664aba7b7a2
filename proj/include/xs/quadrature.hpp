#pragma once

#include "xs/real.hpp"

#include <functional>
#include <vector>

namespace xs {

struct RealInterval {
    Real lo, hi;
    RealInterval(const Real& lo_, const Real& hi_);
    Real width() const { return hi - lo; }
};

using RealFn = std::function<Real(const Real&)>;
// vector-valued integrand: fills out[0..dim)
using VecFn = std::function<void(const Real&, std::vector<Real>&)>;
using ComplexFn = std::function<Complex(const Complex&)>;
using ComplexVecFn = std::function<void(const Complex&, std::vector<Complex>&)>;

// Gauss-Legendre nodes/weights on [-1,1]; cached per (count, precision).
struct GaussRule {
    std::vector<Real> x, w;
};
const GaussRule& gauss_legendre_rule(int nodes, int digits);
int default_gauss_nodes(int digits);

// Composite Gauss-Legendre, panel count doubled until two levels agree.
Real integrate_gauss_legendre(const RealFn& f, const RealInterval& iv, const PrecisionContext& ctx);
std::vector<Real> integrate_gauss_legendre(const VecFn& f, size_t dim, const RealInterval& iv,
                                           const PrecisionContext& ctx);

// Double-exponential rule; endpoint singularities allowed.
Real integrate_tanh_sinh(const RealFn& f, const RealInterval& iv, const PrecisionContext& ctx);
std::vector<Real> integrate_tanh_sinh(const VecFn& f, size_t dim, const RealInterval& iv,
                                      const PrecisionContext& ctx);
Complex integrate_tanh_sinh_complex(const std::function<Complex(const Real&)>& f, const RealInterval& iv,
                            const PrecisionContext& ctx);

// (1/2 pi i) \oint g(s) ds over |s| = radius by the trapezoid rule
Complex integrate_circle(const ComplexFn& g, const Real& radius, const PrecisionContext& ctx);
std::vector<Complex> integrate_circle(const ComplexVecFn& g, size_t dim, const Real& radius,
                                      const PrecisionContext& ctx);

}  // namespace xs
