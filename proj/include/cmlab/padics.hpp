#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cmlab {

// Z/p^N and O_p/p^N with O_p = Z_p[s]/(s^2 - c), c the least positive non-residue mod p.
// Contexts are interned and live for the whole process.
struct PadicCtx {
    long p = 0;
    int N = 0;
    long c = 0;
    mpz_class pN;
};

// p odd prime, N >= 1.
const PadicCtx* padic_ctx(long p, int N);

class PadicElem {
public:
    PadicElem() = default;
    PadicElem(const PadicCtx* ctx, const mpz_class& a, const mpz_class& b = 0);
    static PadicElem from_int(const PadicCtx* ctx, long a, long b = 0);
    // NonUnit if the denominator is divisible by p.
    static PadicElem from_mpq(const PadicCtx* ctx, const mpq_class& q);

    const PadicCtx* ctx() const { return ctx_; }
    long p() const { return ctx_->p; }
    int N() const { return ctx_->N; }
    const mpz_class& a() const { return a_; }
    const mpz_class& b() const { return b_; }
    bool in_Zp() const { return b_ == 0; }

    bool is_zero() const { return a_ == 0 && b_ == 0; }
    // Exact valuation; N for an element that is 0 mod p^N.
    int valuation() const;
    bool is_unit() const { return valuation() == 0; }

    // a + bs -> a - bs.
    PadicElem frob() const;
    // a^2 - c b^2, an element of Z_p.
    PadicElem norm() const;
    // NonUnit unless a unit.
    PadicElem inv() const;
    PadicElem pow(long e) const;
    // Same representative in another context: exact when going down, the added
    // digits are zero when going up.
    PadicElem to_ctx(const PadicCtx* ctx) const;
    // x / p^k; the quotient is only meaningful mod p^{N-k}. NonUnit if p^k does not divide x.
    PadicElem div_p_pow(int k) const;
    // x / y with v(y) <= v(x), meaningful mod p^{N - v(y)}. NonUnit if v(y) > v(x).
    PadicElem div_exact(const PadicElem& y) const;

    PadicElem operator-() const;
    PadicElem& operator+=(const PadicElem& o);
    PadicElem& operator-=(const PadicElem& o);
    PadicElem& operator*=(const PadicElem& o);
    friend PadicElem operator+(PadicElem x, const PadicElem& y) { return x += y; }
    friend PadicElem operator-(PadicElem x, const PadicElem& y) { return x -= y; }
    friend PadicElem operator*(PadicElem x, const PadicElem& y) { return x *= y; }
    // y must be a unit.
    friend PadicElem operator/(const PadicElem& x, const PadicElem& y) { return x * y.inv(); }
    bool operator==(const PadicElem& o) const;
    bool operator!=(const PadicElem& o) const { return !(*this == o); }

    // "a" or "a + b*s", residues mod p^N.
    std::string str() const;

private:
    const PadicCtx* ctx_ = nullptr;
    mpz_class a_, b_;
    void reduce();
    void check_same(const PadicElem& o) const;
};

// Truncated series sum_{n<M} coeffs[n] w^n scaled by p^-denom: the value is
// p^-denom * sum coeffs[n] w^n, with coefficients mod p^N.
class PadicSeries {
public:
    PadicSeries() = default;
    PadicSeries(const PadicCtx* ctx, size_t M, int denom = 0);
    PadicSeries(std::vector<PadicElem> coeffs, int denom = 0);
    // w (M >= 2).
    static PadicSeries variable(const PadicCtx* ctx, size_t M);
    static PadicSeries constant(const PadicElem& x, size_t M);

    const PadicCtx* ctx() const { return ctx_; }
    size_t size() const { return c_.size(); }
    int denom() const { return denom_; }
    const PadicElem& operator[](size_t n) const { return c_[n]; }
    PadicElem& operator[](size_t n) { return c_[n]; }
    const std::vector<PadicElem>& coeffs() const { return c_; }

    bool is_zero() const;
    // Smallest valuation over coefficients (N if zero), before scaling by p^-denom.
    int min_valuation() const;
    // Valuation of the true coefficient of w^n: v(coeffs[n]) - denom.
    int coeff_valuation(size_t n) const { return c_[n].valuation() - denom_; }

    // Change the denominator exponent: raising it multiplies coefficients by a power of
    // p; lowering it divides exactly (NonUnit if not divisible).
    PadicSeries with_denom(int denom) const;
    // Lowest denominator exponent (>= 0) representing the same value.
    PadicSeries normalized() const;
    // Drops the denominator; IntegralityFailure unless every coefficient is divisible.
    PadicSeries integral() const;
    PadicSeries to_ctx(const PadicCtx* ctx) const;
    PadicSeries truncated(size_t M) const;

    PadicSeries operator-() const;
    PadicSeries operator+(const PadicSeries& o) const;
    PadicSeries operator-(const PadicSeries& o) const;
    PadicSeries operator*(const PadicSeries& o) const;
    PadicSeries operator*(const PadicElem& x) const;
    bool operator==(const PadicSeries& o) const;

    PadicSeries derivative() const;      // length M-1
    PadicSeries integrate() const;       // length M+1, zero constant term, raises denom as needed
    PadicSeries frob() const;            // coefficientwise sigma
    // 1/f for a unit constant term (and denom 0). NonUnitConstantTerm otherwise.
    PadicSeries inverse() const;
    // f(g) for g(0) = 0; result length min(size of f, size of g).
    PadicSeries compose(const PadicSeries& g) const;

private:
    const PadicCtx* ctx_ = nullptr;
    std::vector<PadicElem> c_;
    int denom_ = 0;
};

// Root of T^{q-1} = 1 congruent to x0 mod p, q = p for x0 in Z_p and p^2 otherwise.
PadicElem teichmuller(const PadicElem& x0);
PadicElem teichmuller(long x0, long p, int N);

// Polynomial coefficients from the constant term up.
PadicElem poly_eval(const std::vector<PadicElem>& f, const PadicElem& x);
// Newton lifting; requires v(f(x0)) > 2 v(f'(x0)). HenselFails otherwise.
PadicElem hensel_root(const std::vector<PadicElem>& f, const PadicElem& x0);

// g'/g for g(0) a unit and denom 0; exact mod (p^N, w^{M-1}).
PadicSeries dlog(const PadicSeries& g);
// Compositional inverse of an integral f with f(0) = 0 and f'(0) a unit. NotReversible otherwise.
PadicSeries revert(const PadicSeries& f);

// Exact v_p(n!), n >= 0.
long vp_factorial(long n, long p);

}  // namespace cmlab
