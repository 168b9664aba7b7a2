#pragma once

#include "xs/equilibrium.hpp"
#include "xs/linalg.hpp"
#include "xs/potential.hpp"
#include "xs/quadrature.hpp"
#include "xs/real.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xs {

// 12 n digits (at least 64) keeps the bimoment minors positive for the sizes we run
int default_biortho_digits(int n);

// [x-, x+] outside of which x^i e^{jx} e^{-nV(x)} (i, j <= m) is below 10^-(digits+10) of its peak
RealInterval support_window(const Potential& V, int n, int m, const PrecisionContext& ctx);

struct BimomentMatrix {
    int n = 0, m = 0;
    Matrix M;  // M(i, j) = \int x^i e^{jx} e^{-nV(x)} dx
    RealInterval window{Real(-1), Real(1)};
};

BimomentMatrix bimoments(const Potential& V, int n, int m, const PrecisionContext& ctx);

struct BiorthoSystem {
    int n = 0, m = 0, digits = 0;
    Potential V;
    // monic, ascending; p[j] in x, q[j] in y = e^x
    std::vector<std::vector<Real>> p, q;
    std::vector<Real> h;
    RealInterval window{Real(-1), Real(1)};

    Real p_at(int j, const Real& x) const;
    Real q_at(int j, const Real& x) const;  // q_j(e^x)
    Real weight(const Real& x) const;       // e^{-nV(x)}
    // p~_j, q~_j without the e^{-+(j/2) l} factors: e^{-nV/2} p_j and e^{-nV/2} q_j(e^x) / h_j
    Real p_half(int j, const Real& x) const;
    Real q_half(int j, const Real& x) const;
};

// degrees 0..m from the LDU factorization of the bimoment matrix.
// Throws NonPositiveMinor when a pivot comes out <= 0 (precision too low).
BiorthoSystem construct(const Potential& V, int n, int m, const PrecisionContext& ctx);

struct ZeroSet {
    int degree = 0;
    std::vector<Real> zeros_p, zeros_qx;
};

// zeros of p_j and of q_j(e^x); brackets come from the zeros of degree j-1
ZeroSet zeros(const BiorthoSystem& sys, int j, const PrecisionContext& ctx);
// degrees 0..m, each bracketed by the previous one
std::vector<ZeroSet> all_zeros(const BiorthoSystem& sys, const PrecisionContext& ctx);
bool interlaces(const std::vector<Real>& inner, const std::vector<Real>& outer);

// Cq_j(z) = (1/2 pi i) \int q_j(e^s) e^{-nV(s)} / (s - z) ds, z off the real axis
Complex cauchy_transform_q(const BiorthoSystem& sys, int j, const Complex& z, const PrecisionContext& ctx);

// (p~_j(x), q~_j(x)) with the e^{-+(j/2) l_t} factors, t = j/n taken from eq
std::pair<Real, Real> conjugated_pair(const BiorthoSystem& sys, const EquilibriumData& eq, int j, const Real& x,
                                      const PrecisionContext& ctx);

// max_{i,j} |\int p_i q_j w - h_i delta_ij| / max h
Real orthogonality_defect(const BiorthoSystem& sys, const PrecisionContext& ctx);
// \int p_i(x) q_j(e^x) e^{-nV(x)} dx for all i, j <= m
Matrix pairing_matrix(const BiorthoSystem& sys, const PrecisionContext& ctx);

// G_{t,k}(s) and G^_{t,k}(s). The square root is the one that is ~ s at infinity with its cut on
// [-s_b, s_b]; off that segment (in particular on gamma_1 and gamma_2) it agrees with the
// boundary value taken from outside the curves.
Complex G_tk(const EquilibriumData& eq, int k, const Complex& s);
Complex G_hat_tk(const EquilibriumData& eq, int k, const Complex& s);

// JSON with decimal strings. The loader returns nothing for a missing file or a different key,
// recomputes the orthogonality defect and throws IoError if it exceeds 10^-(digits/3) h_max.
std::string biortho_cache_key(const Potential& V, int n, int m, int digits);
void save_biortho(const std::string& path, const BiorthoSystem& sys);
std::optional<BiorthoSystem> load_biortho(const std::string& path, const Potential& V, int n, int m,
                                          const PrecisionContext& ctx);

}  // namespace xs
