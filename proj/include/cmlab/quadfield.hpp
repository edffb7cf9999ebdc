#pragma once

#include "cmlab/bignum.hpp"
#include "cmlab/error.hpp"

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace cmlab {

class QuadField;

// a + b*omega with omega = (d + sqrt(d))/2.
struct QuadInt {
    mpz_class a, b;
    int d = -4;

    QuadInt() = default;
    QuadInt(int d_, mpz_class a_, mpz_class b_) : a(std::move(a_)), b(std::move(b_)), d(d_) {}
    static QuadInt from_int(int d, const mpz_class& x) { return QuadInt(d, x, 0); }

    const QuadField& field() const;
    QuadInt conj() const;
    mpz_class norm() const;
    mpz_class trace() const;
    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }
    // 2*Re under the fixed embedding (exact).
    mpz_class twice_real() const { return 2 * a + b * d; }
    BigComplex to_complex() const;
    std::string str() const;
};

bool operator==(const QuadInt& x, const QuadInt& y);
inline bool operator!=(const QuadInt& x, const QuadInt& y) { return !(x == y); }
QuadInt operator+(const QuadInt& x, const QuadInt& y);
QuadInt operator-(const QuadInt& x, const QuadInt& y);
QuadInt operator-(const QuadInt& x);
QuadInt operator*(const QuadInt& x, const QuadInt& y);
QuadInt qpow(const QuadInt& x, unsigned long k);
// True iff y divides x in O_K.
bool divides(const QuadInt& y, const QuadInt& x);
// x / y, which must be exact.
QuadInt exact_div(const QuadInt& x, const QuadInt& y);
// Total order used for deterministic sorting.
bool quad_less(const QuadInt& x, const QuadInt& y);
// Inverse of QuadInt::str, also accepting w for omega and an outer pair of
// parentheses: "2+i", "(2+i)", "3-w", "(1+sqrt(-7))/2", "5*sqrt(-3)".
// InvalidArgument on anything else or a non-integral value.
QuadInt parse_quad_int(int d, const std::string& s);

class QuadIdeal {
public:
    QuadIdeal() = default;
    explicit QuadIdeal(const QuadInt& g);
    static QuadIdeal unit(int d);

    const QuadInt& gen() const { return gen_; }
    int d() const { return gen_.d; }
    mpz_class norm() const { return gen_.norm(); }
    bool is_unit_ideal() const { return gen_.norm() == 1; }
    bool contains(const QuadInt& x) const { return divides(gen_, x); }
    std::string str() const { return "(" + gen_.str() + ")"; }

private:
    QuadInt gen_;
};

bool operator==(const QuadIdeal& I, const QuadIdeal& J);
inline bool operator!=(const QuadIdeal& I, const QuadIdeal& J) { return !(I == J); }
QuadIdeal operator*(const QuadIdeal& I, const QuadIdeal& J);
bool ideal_less(const QuadIdeal& I, const QuadIdeal& J);

enum class SplitKind { Split, Inert, Ramified };

struct SplitType {
    SplitKind kind;
    long p;
    // Split: {P, conj P}; Inert: {(p)}; Ramified: {P}.
    std::vector<QuadIdeal> primes;
};

struct PrimeFactor {
    QuadIdeal prime;
    long p;
    SplitKind kind;
    int exponent;
};

// Residues modulo an ideal via the Hermite form of the ideal lattice.
class ResidueRing {
public:
    explicit ResidueRing(const QuadIdeal& f);
    // Canonical representative of x mod f.
    QuadInt reduce(const QuadInt& x) const;
    // Index in [0, size) of the class of x.
    long index(const QuadInt& x) const;
    QuadInt element(long idx) const;
    long size() const { return h_ * g_; }
    bool is_unit(const QuadInt& x) const;
    const QuadIdeal& modulus() const { return f_; }
    // Lattice basis {h, c + g*omega} of f.
    long hnf_h() const { return h_; }
    long hnf_g() const { return g_; }
    long hnf_c() const { return c_; }

private:
    QuadIdeal f_;
    long h_ = 1, g_ = 1, c_ = 0;
    std::vector<QuadIdeal> prime_divisors_;
};

class QuadField {
public:
    static const QuadField& get(int d);
    static const std::vector<int>& discriminants();

    int d() const { return d_; }
    // omega^2 = d*omega - n.
    const mpz_class& n() const { return n_; }
    const std::vector<QuadInt>& units() const { return units_; }
    QuadInt omega() const { return QuadInt(d_, 0, 1); }
    QuadInt make(long a, long b) const { return QuadInt(d_, a, b); }
    // sqrt(d) = 2*omega - d.
    QuadInt sqrt_d() const { return QuadInt(d_, -d_, 2); }

private:
    explicit QuadField(int d);
    int d_;
    mpz_class n_;
    std::vector<QuadInt> units_;
};

bool is_prime(long p);
long legendre(long a, long p);

SplitType split_type(const QuadField& K, long p);
std::vector<QuadInt> gens_mod_units(const QuadIdeal& I);
QuadInt canonical_generator(const QuadInt& x);
std::vector<PrimeFactor> factor_ideal(const QuadIdeal& I);
bool coprime(const QuadIdeal& I, const QuadIdeal& J);
std::vector<QuadIdeal> ray_class_reps(const QuadField& K, const QuadIdeal& f);
// Integral ideals of norm <= bound, ordered by norm then generator.
std::vector<QuadIdeal> ideals_up_to(const QuadField& K, long bound);

}  // namespace cmlab
