#pragma once

#include "cmlab/bignum.hpp"
#include "cmlab/cmcurve.hpp"
#include "cmlab/recognize.hpp"

#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace cmlab {

// psi^k (or its conjugate) as a character modulo either the conductor f of psi
// (imprimitive: ideals prime to f) or the conductor f_k of psi^k (primitive).
class HeckeSeries {
public:
    HeckeSeries(const CMCurve& E, unsigned k, bool conjugated, bool primitive);

    unsigned k() const { return k_; }
    bool conjugated() const { return conj_; }
    bool primitive() const { return primitive_; }
    int d() const { return d_; }
    const QuadIdeal& modulus() const { return modulus_; }
    // Conductor of psi^k, and |d_K| N(f_k), the level of the completed function.
    const QuadIdeal& conductor() const { return conductor_; }
    long level() const;

    // chi((alpha)), or 0 when alpha is not prime to the modulus.
    QuadInt value(const QuadInt& alpha) const;
    // a_n = sum over ideals of norm n, n = 0..X (a_0 = 0). Thread-safe, cached.
    std::shared_ptr<const std::vector<QuadInt>> coeffs(long X) const;
    // Euler factor prod (1 - chi_prim(P) NP^-s) over P | f not dividing f_k.
    BigComplex missing_euler_factor(const BigComplex& s) const;

private:
    int d_;
    unsigned k_;
    bool conj_, primitive_;
    QuadIdeal modulus_, conductor_;
    long h_, g_, c_;             // HNF of the table modulus
    std::vector<int> table_;     // residue -> unit index of eps^k, -1 off the unit group
    long ch_, cg_, cc_;          // HNF of the conductor f_k
    std::vector<int> ctable_;    // same for f_k
    std::vector<QuadIdeal> dropped_;  // primes of f not dividing f_k
    mutable std::mutex mu_;
    mutable std::shared_ptr<const std::vector<QuadInt>> cache_;

    QuadInt value_mod(const QuadInt& alpha, long h, long g, long c, const std::vector<int>& t) const;
};

// Shared series, keyed by the model and character data.
std::shared_ptr<const HeckeSeries> hecke_series(const CMCurve& E, unsigned k, bool conjugated, bool primitive);

enum class LMethod { Auto, DirectSum, ApproxFE };
const char* method_name(LMethod m);

struct LOptions {
    LMethod method = LMethod::Auto;
    bool primitive = true;
    // Largest ideal norm a direct sum may use.
    long max_terms = 200000;
    // Direct sums need Re(s) > k/2 + 1 + margin.
    double margin = 0.5;
};

struct LValue {
    unsigned k = 1;
    BigComplex s;
    BigComplex value;
    bool conjugated = false;
    bool primitive = true;
    LMethod method = LMethod::ApproxFE;
    long truncation = 0;        // ideal-norm bound used
    double tail_log10 = 0;      // log10 of the tail bound (DirectSum) or of the cutoff (ApproxFE)
    int digits = 0;
};

// Partial sum over ideals of norm <= X, no convergence checks.
BigComplex partial_sum(const HeckeSeries& S, const BigComplex& s, long X);
// Tail bound for sum_{N a > X} |chi(a)| N a^-sigma, or +inf when sigma <= k/2 + 1.
double direct_tail_log10(const HeckeSeries& S, double sigma, long X);

LValue lvalue(const CMCurve& E, unsigned k, bool conjugated, const BigComplex& s, int digits,
              const LOptions& opt = {});

// Root number W with Lambda(chi, s) = W Lambda(conj chi, k+1-s), fitted by
// moving the split point of the smoothed sum. Cached per character.
BigComplex root_number(const CMCurve& E, unsigned k, bool conjugated, int digits);

// Lambda(s) = (sqrt(level)/(2 pi))^s Gamma(s) L(s) for the primitive character.
BigComplex completed_lambda(const CMCurve& E, unsigned k, bool conjugated, const BigComplex& s, int digits);

struct FECheck {
    unsigned k = 1;
    long level = 0;
    Real s1, s2, s3;
    BigComplex W;
    double W2_minus_1_log10 = 0;
    // Fitted exponent e(s) = offset + slope*s in Lambda_raw(conj psi^k, s) =
    // W level^e(s) Lambda_raw(psi^k, k+1-s), Lambda_raw = (2 pi)^-s Gamma(s) L(s).
    Real slope, offset;
    double residual_log10 = 0;     // third-point residual of the fitted law
    double fixed_form_log10 = 0;   // residual of e(s) = (k+1)/2 - s at the third point
    double printed_form_log10 = 0;   // residual of e(s) = 1/2 - s at the third point
};

FECheck verify_functional_equation(const CMCurve& E, unsigned k, const Real& s0, int digits);

enum class DamerellVariant {
    BracketK,          // L(conj psi^k, k) L(psi^k, k) / (conj Omega^k Omega^k)
    BracketQ,          // L(conj psi^k, k) / Omega_+^k
    BracketQDual,      // L(psi^k, k) / Omega_+^k
    BracketDual,       // (2 pi)^{2(k-1)} L(psi^k, 1) L(conj psi^k, 1) / ((k-1)!^2 Omega^k conj Omega^k)
    BracketDualLiteral // the same with (2 pi)^{2k-1}
};
const char* variant_name(DamerellVariant v);
DamerellVariant parse_variant(const std::string& s);

struct Bracket {
    DamerellVariant variant;
    unsigned k = 1;
    BigComplex numeric;
    AlgebraicInK alg;
    bool zero = false;
    int digits = 0;
};

// Non-throwing: alg.recognized reports success.
Bracket damerell_bracket(const CMCurve& E, unsigned k, DamerellVariant v, int digits,
                         const mpz_class& bound = mpz_class(100000000));
// Throws RecognitionFailed if the bracket is not recognized.
AlgebraicInK damerell_ratio(const CMCurve& E, unsigned k, DamerellVariant v, int digits,
                            const mpz_class& bound = mpz_class(100000000));

// (x)_p = p^v, or infinite for x = 0.
struct PValuation {
    long p = 0;
    bool infinite = false;
    mpq_class v;
    std::string str() const;
};

PValuation padic_valuation(const mpq_class& x, long p);
// For inert or ramified p, v = v_p(N x)/2. Split p with x outside Q: SplitPrimeAmbiguity.
PValuation padic_valuation(const AlgebraicInK& x, long p);
long vp_int(mpz_class n, long p);

}  // namespace cmlab
