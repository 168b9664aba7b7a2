#include "xs/linalg.hpp"

#include "xs/errors.hpp"

namespace xs {

using boost::multiprecision::abs;

Matrix Matrix::identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(c_, r_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matrix product: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

LDU ldu_bidiagonalize(const Matrix& m, const PrecisionContext& ctx) {
    if (m.rows() != m.cols()) throw ValidationError("ldu: matrix must be square");
    ScopedPrecision guard(ctx.digits);
    const size_t n = m.rows();
    const Real tol = pow10(-(ctx.digits - 8));
    Matrix a = m;
    // track the largest magnitude that fed into each entry, to detect total cancellation
    Matrix scale(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) scale(i, j) = abs(m(i, j));

    LDU r{Matrix::identity(n), std::vector<Real>(n), Matrix::identity(n)};
    for (size_t k = 0; k < n; ++k) {
        const Real& p = a(k, k);
        if (p == 0 || abs(p) <= tol * scale(k, k))
            throw SingularMinor(static_cast<int>(k), "ldu: pivot " + std::to_string(k) + " lost all significant digits");
        r.D[k] = p;
        for (size_t i = k + 1; i < n; ++i) {
            r.L(i, k) = a(i, k) / p;
            r.U(k, i) = a(k, i) / p;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j) {
                Real t = r.L(i, k) * a(k, j);
                a(i, j) -= t;
                Real at = abs(t);
                if (at > scale(i, j)) scale(i, j) = at;
            }
    }
    return r;
}

Matrix unit_lower_inverse(const Matrix& l) {
    const size_t n = l.rows();
    Matrix x = Matrix::identity(n);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = j + 1; i < n; ++i) {
            Real s = 0;
            for (size_t k = j; k < i; ++k) s += l(i, k) * x(k, j);
            x(i, j) = -s;
        }
    return x;
}

Matrix unit_upper_inverse(const Matrix& u) { return unit_lower_inverse(u.transpose()).transpose(); }

std::vector<Real> solve_linear(Matrix a, std::vector<Real> b) {
    const size_t n = a.rows();
    Real amax = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) amax = std::max(amax, Real(abs(a(i, j))));
    const Real tiny = amax * pow10(-static_cast<long>(Real::default_precision()) + 4);
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        for (size_t i = k + 1; i < n; ++i)
            if (abs(a(i, k)) > abs(a(piv, k))) piv = i;
        if (amax == 0 || abs(a(piv, k)) <= tiny) throw SingularJacobian("linear solve: singular matrix");
        if (piv != k) {
            for (size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (size_t i = k + 1; i < n; ++i) {
            Real f = a(i, k) / a(k, k);
            for (size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<Real> x(n);
    for (size_t i = n; i-- > 0;) {
        Real s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace xs
