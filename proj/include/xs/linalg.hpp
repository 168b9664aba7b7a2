#pragma once

#include "xs/real.hpp"

#include <vector>

namespace xs {

class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols) : r_(rows), c_(cols), a_(rows * cols, Real(0)) {}
    static Matrix identity(size_t n);

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    Real& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const Real& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    Matrix transpose() const;

private:
    size_t r_ = 0, c_ = 0;
    std::vector<Real> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

struct LDU {
    Matrix L;               // unit lower triangular
    std::vector<Real> D;    // diagonal
    Matrix U;               // unit upper triangular
};

// Doolittle elimination without pivoting; D_kk is the ratio of leading minors k+1 and k.
// Throws SingularMinor(k) if pivot k cancels below 10^-(digits-8) of its scale.
LDU ldu_bidiagonalize(const Matrix& m, const PrecisionContext& ctx);

// inverse of a unit lower (upper) triangular matrix
Matrix unit_lower_inverse(const Matrix& l);
Matrix unit_upper_inverse(const Matrix& u);

// Gaussian elimination with partial pivoting. Throws SingularJacobian.
std::vector<Real> solve_linear(Matrix a, std::vector<Real> b);

}  // namespace xs
