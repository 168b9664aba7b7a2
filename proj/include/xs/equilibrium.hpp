#pragma once

#include "xs/poly.hpp"
#include "xs/potential.hpp"
#include "xs/quadrature.hpp"
#include "xs/real.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xs {

// J(s) = c1 s + c0 - log((s - 1/2)/(s + 1/2)). Throws OnBranchCut near [-1/2, 1/2].
Complex map_J(const Real& c1, const Real& c0, const Complex& s, const PrecisionContext& ctx);
Complex map_J_prime(const Real& c1, const Complex& s);

struct EquilibriumData {
    Real t, c0, c1, s_b, s_a, a, b, alpha, beta, P, Q, ell, x_min, x_hat_min;
    Potential V;  // materialized at `digits`
    int digits = 0;
    // polynomial part at infinity of V'(J(s)); psi(x) = Im hpoly(I+(x)) / (pi t)
    std::vector<Real> hpoly;
    // gamma_1 sampled at x = c0 + ((b-a)/2) cos(theta), theta uniform on [0, pi]
    std::vector<Complex> trace;
};

// psi_t tabulated as psi(x) = h(x) sqrt((x-a)(b-x)) with h a Chebyshev interpolant.
struct DensityTable {
    Real a, b;
    std::vector<Real> nodes, values;  // psi at the Chebyshev nodes
    Real mass_check;
    Chebyshev h;
    // nested second-kind Gauss-Chebyshev rules for d mu: theta_j = j pi / kRuleMax,
    // rule_x = mid + r cos(theta_j), rule_w = r^2 sin^2(theta_j) h(rule_x)
    static constexpr int kRuleMax = 4096;
    std::vector<Real> rule_x, rule_w;

    Real psi(const Real& x) const;
};

struct Equilibrium {
    EquilibriumData data;
    DensityTable table;
};

// (c1, c0) from the two contour conditions; Newton from (t, t/2), halving t for continuation on failure.
std::pair<Real, Real> solve_coefficients(const Potential& V, const Real& t, const PrecisionContext& ctx);
// residuals of both contour conditions on a circle of the given radius
std::pair<Real, Real> coefficient_residuals(const Potential& V, const Real& t, const Real& c1, const Real& c0,
                                            const Real& radius, const PrecisionContext& ctx);

// full solve: coefficients, endpoints, edge constants, density table and the Lagrange constant
Equilibrium solve_equilibrium(const Potential& V, const Real& t, const PrecisionContext& ctx, int table_nodes = 512);

std::pair<Real, Real> endpoints(const EquilibriumData& eq);

enum class Branch { upper, lower };
Complex inverse_map(const EquilibriumData& eq, const Real& x, Branch branch, const PrecisionContext& ctx);

// psi_t(x) from the log integral over [a, b], split at u = x, tanh-sinh on each half
Real density(const EquilibriumData& eq, const Real& x, const PrecisionContext& ctx);
// psi_t(x) by deforming that integral onto a circle (residue at infinity)
Real density_contour(const EquilibriumData& eq, const Real& x, const PrecisionContext& ctx);
DensityTable build_density_table(const EquilibriumData& eq, const PrecisionContext& ctx, int nodes = 512);

// (alpha, beta) from P, Q; P, Q recomputed on the circle
std::pair<Real, Real> edge_constants(const EquilibriumData& eq, const PrecisionContext& ctx);
// Richardson-extrapolated psi(b - eps)/sqrt(eps) (right) or psi(a + eps)/sqrt(eps) (left).
// psi is the probability density, so this tends to beta/t (alpha/t).
Real edge_fit(const EquilibriumData& eq, bool right, const PrecisionContext& ctx);
// (a'(t), b'(t))
std::pair<Real, Real> endpoint_derivatives(const EquilibriumData& eq);

// \int f d mu_t with the nested Gauss-Chebyshev rule; f must be smooth on [a, b]
Real measure_integral(const DensityTable& tab, const RealFn& f, const PrecisionContext& ctx);
// \int log|x - y| d mu_t(x)
Real log_potential(const DensityTable& tab, const Real& y, const PrecisionContext& ctx);

// (g_t(z), g~_t(z)) for z off (-inf, b]
std::pair<Complex, Complex> g_functions(const EquilibriumData& eq, const DensityTable& tab, const Complex& z,
                                        const PrecisionContext& ctx);
// F_t(z) = (t/2) \int [s + Log E(z - s)] d mu_t(s), E(w) = (e^w - 1)/w; |Im z| < pi
Complex F_function(const EquilibriumData& eq, const DensityTable& tab, const Complex& z,
                   const PrecisionContext& ctx);
Real F_real(const EquilibriumData& eq, const DensityTable& tab, const Real& x, const PrecisionContext& ctx);

// \int log|x-y| d mu + \int log|e^x - e^y| d mu - V(y)/t at real y
Real variational_value(const EquilibriumData& eq, const DensityTable& tab, const Real& y,
                       const PrecisionContext& ctx);
// l_t at (a+b)/2, checked at two more interior points; throws VariationalViolation
Real lagrange_constant(const EquilibriumData& eq, const DensityTable& tab, const PrecisionContext& ctx);
// variational_value(y) - l_t; zero on [a, b], negative outside
Real effective_potential(const EquilibriumData& eq, const DensityTable& tab, const Real& y,
                         const PrecisionContext& ctx);

// JSON cache keyed by (V, t, digits)
std::string equilibrium_cache_key(const Potential& V, const std::string& t, int digits);
void save_equilibrium(const std::string& path, const Equilibrium& eq, const std::string& t_text);
std::optional<Equilibrium> load_equilibrium(const std::string& path, const Potential& V, const std::string& t_text,
                                            const PrecisionContext& ctx);

}  // namespace xs
