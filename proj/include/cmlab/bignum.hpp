#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <gmpxx.h>

#include <cmath>
#include <string>

namespace cmlab {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

// Working precision in decimal digits. The MPFR default precision is process
// wide in this Boost version, so set it from the orchestrating thread only.
int working_digits();

class DigitsGuard {
public:
    explicit DigitsGuard(int digits);
    ~DigitsGuard();
    DigitsGuard(const DigitsGuard&) = delete;
    DigitsGuard& operator=(const DigitsGuard&) = delete;

private:
    unsigned saved_;
};

Real real_pi();
// Copy of x carried at the current default precision. Boost keeps the operand
// precision through arithmetic, so inputs made at a lower default would otherwise
// cap every result derived from them.
Real promote(const Real& x);
Real from_mpz(const mpz_class& z);
Real from_mpq(const mpq_class& q);
Real ten_pow(int e);
inline Real rmax(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real rmin(const Real& a, const Real& b) { return a < b ? a : b; }
// Nearest integer (ties away from zero).
mpz_class round_to_mpz(const Real& x);
// Fixed-format decimal string with the given significant digits.
std::string to_string(const Real& x, int sig = 30);
// log10 of |x|, or -infinity for 0.
double log10_abs(const Real& x);

struct BigComplex {
    Real re{0};
    Real im{0};
    // Heuristic decimal exponent of the relative error.
    double err = -1e300;

    BigComplex() = default;
    BigComplex(const Real& r) : re(r), im(0) {}
    BigComplex(const Real& r, const Real& i) : re(r), im(i) {}
    BigComplex(long r) : re(r), im(0) {}
    BigComplex(int r) : re(r), im(0) {}
    BigComplex(long r, long i) : re(r), im(i) {}

    BigComplex conj() const { return {re, -im, err}; }
    Real norm2() const { return re * re + im * im; }
    Real abs() const;
    Real arg() const;

    BigComplex& operator+=(const BigComplex& o);
    BigComplex& operator-=(const BigComplex& o);
    BigComplex& operator*=(const BigComplex& o);
    BigComplex& operator/=(const BigComplex& o);

private:
    BigComplex(const Real& r, const Real& i, double e) : re(r), im(i), err(e) {}
    friend BigComplex operator-(const BigComplex& a);
};

BigComplex operator+(BigComplex a, const BigComplex& b);
BigComplex operator-(BigComplex a, const BigComplex& b);
BigComplex operator*(BigComplex a, const BigComplex& b);
BigComplex operator/(BigComplex a, const BigComplex& b);
BigComplex operator-(const BigComplex& a);
BigComplex operator*(BigComplex a, const Real& b);
BigComplex operator*(const Real& b, BigComplex a);
BigComplex operator/(BigComplex a, const Real& b);

BigComplex cexp(const BigComplex& z);
BigComplex clog(const BigComplex& z);
BigComplex csqrt(const BigComplex& z);
BigComplex cpow(const BigComplex& z, long n);
inline BigComplex promote(const BigComplex& z) { return BigComplex(promote(z.re), promote(z.im)); }
// z^w via exp(w log z), principal branch.
BigComplex cpow(const BigComplex& z, const BigComplex& w);
BigComplex polar(const Real& r, const Real& theta);
Real cabs(const BigComplex& z);
std::string to_string(const BigComplex& z, int sig = 30);

// |a - b| / max(|b|, tiny); returns |a - b| when b vanishes.
Real rel_diff(const BigComplex& a, const BigComplex& b);

}  // namespace cmlab
