#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace xs {

using Real = boost::multiprecision::mpfr_float;

struct PrecisionContext {
    int digits = 64;
    Real quad_rel_tol;
    int max_panel_doublings = 16;
    Real newton_tol;
    int newton_max_iter = 80;

    // tolerances tied to the digit count: quadrature 10^-(d-8), Newton 10^-(d-14)
    static PrecisionContext with_digits(int digits);
    void validate() const;
};

// Sets the default precision for new mpfr values and restores it on exit.
// Boost keeps this as a process-wide static, so don't share one across threads.
class ScopedPrecision {
public:
    explicit ScopedPrecision(int digits);
    ~ScopedPrecision();
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

private:
    unsigned old_;
};

Real pow10(long e);
Real pi();
Real ln2();
Real with_digits(const Real& x, int digits);  // copy carrying the given precision
int digits_of(const Real& x);

// Exact decimal round trip at the precision of x.
std::string to_decimal(const Real& x);
Real from_decimal(const std::string& s, int digits);
// short form for CSV/reporting
std::string to_decimal(const Real& x, int significant);

// Plain complex number over Real. Only what the project needs.
struct Complex {
    Real re, im;

    Complex() : re(0), im(0) {}
    Complex(const Real& r) : re(r), im(0) {}
    Complex(const Real& r, const Real& i) : re(r), im(i) {}
    Complex(int r) : re(r), im(0) {}

    Complex& operator+=(const Complex& o) { re += o.re; im += o.im; return *this; }
    Complex& operator-=(const Complex& o) { re -= o.re; im -= o.im; return *this; }
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator-(const Complex& a);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);   // in (-pi, pi]
Complex exp(const Complex& z);
Complex log(const Complex& z);   // principal branch
Complex sqrt(const Complex& z);  // principal branch
// (e^w - 1)/w, analytic at 0
Complex exprel(const Complex& w);
Real exprel(const Real& w);

}  // namespace xs
