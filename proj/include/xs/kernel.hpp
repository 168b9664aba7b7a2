#pragma once

#include "xs/biortho.hpp"
#include "xs/equilibrium.hpp"
#include "xs/real.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xs {

enum class Regime { bulk, edge_right, edge_left, raw };
std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);  // ValidationError on anything else

// K_n(x, y) = sum_{j<n} p_j(x) q_j(e^y) e^{-n(V(x)+V(y))/2} / h_j
Real kernel_raw(const BiorthoSystem& sys, const Real& x, const Real& y);
Complex kernel_raw(const BiorthoSystem& sys, const Complex& x, const Complex& y);

// e^{nF(x)} K_n(x, y) e^{-nF(y)}, F from the t = 1 equilibrium
Real kernel_conjugated(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& x, const Real& y,
                       const PrecisionContext& ctx);

Real sine_kernel(const Real& xi, const Real& eta);
// \int_0^L Ai(xi + y) Ai(eta + y) dy
Real airy_tail_integral(const Real& xi, const Real& eta, const Real& L, const PrecisionContext& ctx);

struct ScaledValue {
    Real value, reference;
};

// The sine limit only has diagonal 1 when the local unit is 1/(psi n); with 1/(pi psi n) the
// same expression tends to sin(xi-eta)/(pi(xi-eta)) instead. `density` is the default; `literal`
// keeps the pi. The reference is the sine kernel either way.
enum class BulkScaling { density, literal };

// (e^{F'(x*)(xi-eta)/s} / s) K_n(x* + xi/(s n), x* + eta/(s n)) / n, s = psi(x*) or pi psi(x*).
// F' by central difference with step 10^-(digits/4). Throws OutsideBulk unless a < x* < b.
ScaledValue bulk_scaled(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& x_star, const Real& xi,
                        const Real& eta, const PrecisionContext& ctx, BulkScaling scaling = BulkScaling::density);

enum class Edge { right, left };

// right: e^{n(F(u)-F(v))} K_n(u, v) / (pi beta n)^{2/3}, u = b + xi/(pi beta n)^{2/3}
// left:  same with a - xi/(pi alpha n)^{2/3}
ScaledValue edge_scaled(const BiorthoSystem& sys, const Equilibrium& eq1, Edge side, const Real& xi,
                        const Real& eta, const PrecisionContext& ctx);

// Right edge of the system built for V(-x) + ((n-1)/n) x, read with the left-edge constants of V
// (b -> -a, beta -> alpha) and the gauge F_V(-x) + (n-1)x/(2n). K_V(-x,-y) equals
// e^{(n-1)(x-y)/2} K_W(x,y) exactly, so this reproduces edge_scaled(left) of the V system.
ScaledValue edge_scaled_reflected(const BiorthoSystem& reflected, const Equilibrium& eq1_of_V, const Real& xi,
                                  const Real& eta, const PrecisionContext& ctx);

struct KernelRequest {
    int n = 0;
    Regime regime = Regime::bulk;
    std::optional<Real> x_star;
    std::vector<std::pair<Real, Real>> grid;
    bool conjugate = true;
    BulkScaling scaling = BulkScaling::density;

    void validate(const EquilibriumData& eq1) const;
};

struct KernelResult {
    std::vector<Real> values, reference, abs_err, rel_err;
    double seconds = 0;

    Real max_abs_err() const;
};

// raw regime: values are K_n (or its conjugate) at the grid points taken as (x, y), reference is
// K_n itself so the error columns hold the conjugation effect (zero when conjugate is off)
KernelResult evaluate_kernel(const BiorthoSystem& sys, const Equilibrium& eq1, const KernelRequest& req,
                             const PrecisionContext& ctx);

// \int K_n(x, x) dx
Real kernel_trace(const BiorthoSystem& sys, const PrecisionContext& ctx);
// |\int K_n(x, s) K_n(s, y) ds - K_n(x, y)|
Real projection_residual(const BiorthoSystem& sys, const Real& x, const Real& y, const PrecisionContext& ctx);

}  // namespace xs
