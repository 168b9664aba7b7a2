#pragma once

#include "xs/biortho.hpp"
#include "xs/equilibrium.hpp"
#include "xs/kernel.hpp"
#include "xs/real.hpp"

#include <array>
#include <map>
#include <utility>
#include <vector>

namespace xs {

struct SplitBounds {
    // K^(i) runs over (last[i-1], last[i]], last[-1] = -1, last[3] = n-1
    std::array<int, 4> last{};
};

// floor(delta n), floor((1-delta') n), floor((1 - M n^{-2/3}) n), clamped to be nondecreasing.
// When the M window reaches below (1-delta') n the middle blocks give way, so K^(4) keeps the
// degrees that M asks for.
SplitBounds split_bounds(int n, const Real& delta, const Real& delta_prime, int M);

struct KernelSplit {
    SplitBounds bounds;
    std::array<Real, 4> parts;       // raw partial sums
    std::array<Real, 4> conjugated;  // e^{n(F(u)-F(v))} times the part
    Real total;                      // sum of parts
};

KernelSplit kernel_split(const BiorthoSystem& sys, const Equilibrium& eq1, const Real& delta,
                         const Real& delta_prime, int M, const Real& u, const Real& v, const PrecisionContext& ctx);

// \int_0^{(pi beta)^{2/3} b'(1) M} Ai(xi + y) Ai(eta + y) dy, the limit of K^(4)/(pi beta n)^{2/3}
Real split_airy_reference(const EquilibriumData& eq1, int M, const Real& xi, const Real& eta,
                          const PrecisionContext& ctx);

// l_{j/n} for j = lo..hi, each from its own equilibrium solve at `digits`; j = 0 gives 0
std::vector<Real> lagrange_table(const Potential& V, int n, int lo, int hi, int digits);

struct CDDiagnostics {
    int n = 0, k_delta = 0, M = 0;
    Real delta;
    // l_{j/n}, j = 0..sys.m, or empty for the gauge without the e^{-+(j/2) l} factors
    std::vector<Real> ell;
    // j, k = 0..sys.m
    std::map<std::pair<int, int>, Real> a_coeffs, b_coeffs;
    std::map<int, Real> alpha_limits;  // l = -1..4
    Complex J1_value, J2_value;

    const Real& a(int j, int k) const;
    const Real& b(int j, int k) const;
};

// exp_k(z) = sum_{i<=k} z^i / i!
Real exp_truncated(int k, const Real& x);
Complex exp_truncated(int k, const Complex& z);
// max_{|z| = C2} |exp(z) - exp_k(z)| e^{(k/2) log k}; the disc maximum sits on the circle
Real exp_truncation_ratio(int k, const Real& C2, const PrecisionContext& ctx);

// alpha_l = (c1/(1+l)! + 1/l!) e^{c1/2 + c0}, alpha_{-1} = c1 e^{c1/2 + c0}
Real alpha_limit(int l, const EquilibriumData& eq1);

// degrees the decomposition reaches: n - 1 + max(floor(delta n), M)
int cd_degrees_needed(int n, const Real& delta, int M);

// a_{j,k} = \int p~_k q~_j e^x, b_{j,k} = \int p~_j q~_k exp_{floor(delta n)} over the support
// window, j, k = 0..sys.m. With an empty ell, p~_j = e^{-nV/2} p_j and q~_j = e^{-nV/2} q_j(e^x)/h_j;
// this is the normalization under which a_{n-1,n} = h_n/h_{n-1} -> alpha_{-1}. Otherwise ell must
// hold l_{j/n} for j = 0..sys.m (lagrange_table). J1, J2 and the main term do not depend on the choice.
CDDiagnostics cd_coefficients(const BiorthoSystem& sys, const Real& delta, int M, const std::vector<Real>& ell,
                              const EquilibriumData& eq1, const PrecisionContext& ctx);

// p~_j(z), q~_j(z), with the l_{j/n} factors when d carries a table
Complex p_tilde(const BiorthoSystem& sys, const CDDiagnostics& d, int j, const Complex& z);
Complex q_tilde(const BiorthoSystem& sys, const CDDiagnostics& d, int j, const Complex& z);

struct CDDecomposition {
    Complex J1, J2, corner;  // corner = a_{n-1,n} p~_{n-1}(u) q~_n(v)
    Complex lhs;             // (exp_{floor(delta n)}(u) - e^v) K_n(u, v)
    Complex residual;        // lhs - (J1 + J2 - corner)
    Complex main_term;       // conjugated
    Complex J1_conj, J2_conj, conj_factor;
};

// u, v are the points themselves (possibly complex)
CDDecomposition cd_decomposition(const BiorthoSystem& sys, CDDiagnostics& d, const Equilibrium& eq1,
                                 const Complex& u, const Complex& v, const PrecisionContext& ctx);

// x* + xi/(psi(x*) n); with BulkScaling::literal the pi stays in
Complex bulk_point(const Equilibrium& eq1, const Real& x_star, const Complex& xi, int n,
                   const PrecisionContext& ctx, BulkScaling scaling = BulkScaling::density);
// (e^{x*}/pi) sin(pi(xi - eta))
Complex main_term_target(const Real& x_star, const Complex& xi, const Complex& eta);

}  // namespace xs
