#include "cmlab/bignum.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cmlab {

int working_digits() { return static_cast<int>(Real::default_precision()); }

DigitsGuard::DigitsGuard(int digits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
}

DigitsGuard::~DigitsGuard() { Real::default_precision(saved_); }

Real real_pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

Real promote(const Real& x) {
    Real r;
    mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

Real from_mpz(const mpz_class& z) {
    Real r;
    mpfr_set_z(r.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

Real from_mpq(const mpq_class& q) {
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

Real ten_pow(int e) { return pow(Real(10), e); }

mpz_class round_to_mpz(const Real& x) {
    mpz_class z;
    Real r = round(x);
    mpfr_get_z(z.get_mpz_t(), r.backend().data(), MPFR_RNDN);
    return z;
}

std::string to_string(const Real& x, int sig) {
    if (x == 0) return "0";
    std::ostringstream os;
    os << std::scientific << std::setprecision(sig - 1) << x;
    return os.str();
}

double log10_abs(const Real& x) {
    if (x == 0) return -std::numeric_limits<double>::infinity();
    long e = 0;
    double m = mpfr_get_d_2exp(&e, x.backend().data(), MPFR_RNDN);
    return std::log10(std::fabs(m)) + static_cast<double>(e) * std::log10(2.0);
}

namespace {

double combine_err(double a, double b) {
    double floor_e = -static_cast<double>(working_digits());
    return std::max({a, b, floor_e});
}

}  // namespace

Real BigComplex::abs() const { return sqrt(re * re + im * im); }

Real BigComplex::arg() const { return atan2(im, re); }

BigComplex& BigComplex::operator+=(const BigComplex& o) {
    re += o.re;
    im += o.im;
    err = combine_err(err, o.err);
    return *this;
}

BigComplex& BigComplex::operator-=(const BigComplex& o) {
    re -= o.re;
    im -= o.im;
    err = combine_err(err, o.err);
    return *this;
}

BigComplex& BigComplex::operator*=(const BigComplex& o) {
    Real r = re * o.re - im * o.im;
    Real i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    err = combine_err(err, o.err);
    return *this;
}

BigComplex& BigComplex::operator/=(const BigComplex& o) {
    Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    Real i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    err = combine_err(err, o.err);
    return *this;
}

BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
BigComplex operator-(const BigComplex& a) { return {-a.re, -a.im, a.err}; }

BigComplex operator*(BigComplex a, const Real& b) {
    a.re *= b;
    a.im *= b;
    return a;
}

BigComplex operator*(const Real& b, BigComplex a) { return std::move(a) * b; }

BigComplex operator/(BigComplex a, const Real& b) {
    a.re /= b;
    a.im /= b;
    return a;
}

BigComplex cexp(const BigComplex& z) {
    Real m = exp(z.re);
    BigComplex r(m * cos(z.im), m * sin(z.im));
    r.err = z.err;
    return r;
}

BigComplex clog(const BigComplex& z) {
    BigComplex r(log(z.abs()), z.arg());
    r.err = z.err;
    return r;
}

BigComplex csqrt(const BigComplex& z) {
    if (z.re == 0 && z.im == 0) return BigComplex(0);
    Real m = z.abs();
    Real a = sqrt((m + abs(z.re)) / 2);
    BigComplex r;
    if (z.re >= 0) {
        r = BigComplex(a, z.im / (2 * a));
    } else {
        Real b = z.im >= 0 ? a : Real(-a);
        r = BigComplex(abs(z.im) / (2 * a), b);
    }
    r.err = z.err;
    return r;
}

BigComplex cpow(const BigComplex& z, long n) {
    if (n < 0) return BigComplex(1) / cpow(z, -n);
    BigComplex result(1), base = z;
    while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n) base *= base;
    }
    return result;
}

BigComplex cpow(const BigComplex& z, const BigComplex& w) {
    if (z.re == 0 && z.im == 0) return BigComplex(0);
    return cexp(w * clog(z));
}

BigComplex polar(const Real& r, const Real& theta) { return {r * cos(theta), r * sin(theta)}; }

Real cabs(const BigComplex& z) { return z.abs(); }

std::string to_string(const BigComplex& z, int sig) {
    std::string s = to_string(z.re, sig);
    if (z.im >= 0) s += "+";
    s += to_string(z.im, sig) + "i";
    return s;
}

Real rel_diff(const BigComplex& a, const BigComplex& b) {
    Real d = (a - b).abs();
    Real m = b.abs();
    if (m == 0) return d;
    return d / m;
}

}  // namespace cmlab
