#pragma once

#include "cmlab/cmcurve.hpp"
#include "cmlab/padics.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace cmlab {

enum class FormalKind { Weierstrass, LubinTate };
const char* kind_name(FormalKind k);

// One-parameter formal group over O_p given by its logarithm. Series live in a
// working context with guard digits; results handed out are reduced to precision N.
class FormalGroupData {
public:
    FormalKind kind = FormalKind::Weierstrass;
    long p = 0;
    int N = 0;                          // requested precision
    size_t M = 0;                       // truncation in the parameter
    const PadicCtx* work = nullptr;     // N plus guard digits
    std::string label;                  // curve label (Weierstrass)
    mpq_class A, B;                     // short model (Weierstrass)
    PadicElem pi;                       // uniformizer (Lubin-Tate), precision N

    PadicSeries log;        // lambda = w + ..., working context, with denominators
    PadicSeries log_prime;  // lambda', integral, precision N
    PadicSeries exp;        // lambda^-1, working context, with denominators

    const PadicCtx* ctx() const { return padic_ctx(p, N); }
    // [a](w) = exp(a lambda(w)) mod (p^N, w^M). a is lifted to the working context, so pass
    // it at that precision when it is not an integer. IntegralityFailure if a coefficient is not integral.
    PadicSeries apply(const PadicElem& a) const;
    // [m](w), memoized.
    PadicSeries mult(long m) const;
    // F(X, Y) restricted to Y = g(X) with g(0) = 0: exp(lambda(X) + lambda(g(X))).
    PadicSeries add(const PadicSeries& X, const PadicSeries& Y) const;

private:
    struct Memo {
        std::mutex mu;
        std::map<long, PadicSeries> mult;
    };
    std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

// Formal group of the short model at p > 3 with good reduction, parameter t = -x/y.
FormalGroupData weierstrass_formal_log(const CMCurve& E, long p, int N, size_t M);

// Lubin-Tate group over O_p with [pi](X) = pi X + X^{p^2}; pi must have valuation 1.
FormalGroupData lubin_tate(const PadicElem& pi, long p, int N, size_t M);

struct MultByP {
    long p = 0;
    size_t M = 0;
    // [p](t) by lambda-conjugation; only when M <= series_limit().
    bool have_series = false;
    PadicSeries series;
    // Lowest degree of a unit coefficient in [p](t) mod p, from the group law over F_p((t)).
    long unit_degree = 0;
    int height = 0;
    // The lambda-conjugated series reduces to the same leading degree.
    bool series_agrees = true;
};
size_t series_limit();

// TruncationTooShort if M <= p^2.
MultByP mult_by_p(const FormalGroupData& fg);

// Leading degree of [p](t) mod p for the formal group of E at p, using Laurent
// arithmetic over F_p with relative precision at least M.
long reduction_unit_degree(const CMCurve& E, long p, size_t M);

// (D^k log g)(0), D = (1/lambda') d/dw. g(0) a unit, M >= k + 2.
PadicElem coates_wiles_delta(const FormalGroupData& fg, const PadicSeries& g, unsigned k);
PadicElem coates_wiles_delta(const PadicSeries& log_prime, const PadicSeries& g, unsigned k);

struct ImageEntry {
    unsigned k = 0;
    PadicElem delta;
    int valuation = 0;
    long expected = 0;  // v_p((k-1)!)
    bool ok = false;
    // delta_k = -(k-1)!/beta^k, the value for lambda' = 1.
    bool matches_flat = false;
};

struct LubinTateImageReport {
    long p = 0;
    int N = 0;
    size_t M = 0;
    PadicElem pi, beta;
    bool beta_ok = false;        // beta^{p^2-1} = 1 - pi and beta = 1 mod p
    bool log_prime_flat = false; // lambda'_n = 0 for 0 < n < p^2 - 1
    bool sparsity_ok = false;    // exp(z) only has degrees 1 mod p^2 - 1
    bool mu_action_ok = false;   // [zeta](w) = zeta w on mu_{p^2-1}
    std::vector<ImageEntry> entries;
    bool all_ok = false;
};

// delta_k(beta - w) for k = 1..k_max on the Lubin-Tate group of pi: valuations equal v_p((k-1)!).
// Mismatches are report entries, not exceptions. Requires k_max < p^2 - 1 and M > p^2.
LubinTateImageReport verify_lubin_tate_image(long p, const PadicElem& pi, unsigned k_max, int N, size_t M);

}  // namespace cmlab
