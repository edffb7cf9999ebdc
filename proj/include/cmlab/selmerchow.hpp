#pragma once

#include "cmlab/cmcurve.hpp"
#include "cmlab/heckel.hpp"
#include "cmlab/recognize.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cmlab {

// psi^k mod p is irreducible over the residue field: (p + 1) does not divide k.
bool chi_irreducible(long p, long k);
// psi^k mod p is the cyclotomic character: (p^2 - 1) divides k - 1 - p.
bool chi_cyclotomic(long p, long k);

struct CheckItem {
    std::string name;
    std::string value;
    bool pass = false;
};

// p prime, p > k, p prime to 6, supersingular at p, p prime to 6f (psi onto O_p^x).
std::vector<CheckItem> check_selmer_hypotheses(const CMCurve& E, long p, long k);

// Smallest-norm ideal a prime to 6pf with N a - psi(a)^k a p-adic unit.
// CyclotomicObstruction when chi_cyclotomic(p, k); SearchExhausted past the bound.
QuadIdeal find_twisting_ideal(const CMCurve& E, unsigned k, long p, long search_bound = 1000);

enum class Verdict { Certified, HypothesisFailed, Inconclusive };
const char* verdict_name(Verdict v);

struct BracketEntry {
    std::string name;
    std::string reading;
    BigComplex numeric;
    AlgebraicInK alg;
    // "" or "sqrt|d_K|": the value recognized after multiplying by sqrt|d_K|, a p-adic unit here.
    std::string normalization;
    bool recognized = false;
    bool have_valuation = false;
    PValuation valuation;
    std::string note;
};

// Records that hypotheses hold and what the bracket evaluates to; the theorem id
// names the result that turns this into an arithmetic statement.
struct Certificate {
    static constexpr int schema_version = 1;
    std::string curve;
    std::string theorem;
    long p = 0;
    std::vector<std::pair<std::string, long>> params;
    std::vector<CheckItem> checklist;
    std::vector<BracketEntry> brackets;
    std::string predicted_order;  // "7^0", "inf", or empty
    std::optional<bool> finite;
    Verdict verdict = Verdict::Inconclusive;
    std::string reason;
    // Verdicts under alternative readings, e.g. {"literal", "HypothesisFailed: ..."}.
    std::vector<std::pair<std::string, std::string>> readings;

    bool checklist_passes() const;
};

// Stable field order.
std::string certificate_json(const Certificate& c, int indent = 2);

enum class SelmerVariant { OverK, OverQ, OverQDual, OverKDual };
const char* selmer_variant_name(SelmerVariant v);
SelmerVariant parse_selmer_variant(const std::string& s);

Certificate predicted_selmer_order(const CMCurve& E, unsigned k, long p, SelmerVariant v, int digits = 40);

struct ChowCondition {
    long n = 0;
    long value = 0;    // n + 1 + p(n - 1) (supersingular) or 2n (ordinary)
    long modulus = 0;  // p^2 - 1 or p - 1
    bool pass = false;
    bool pass_variant = false;  // ordinary: n = 0 dropped
};

struct ChowConditions {
    long p = 0;
    long i = 0;
    long d = 0;
    Reduction reduction = Reduction::Supersingular;
    std::vector<ChowCondition> entries;
    bool all_pass = false;
    bool all_pass_variant = false;
    bool sufficient = false;  // p > 2d + 1
};

// Per-n conditions for 0 <= n <= i - 1. d defaults to i.
ChowConditions chow_conditions(long p, long i, Reduction reduction, long d = 0);

// Torsion in the image of the cycle class map on CH^i(E^d) at p. The verdict uses
// the critical reading (2 pi)^j L(psi^2j, j) / Omega^2j, j = 1..i-1; the literal value
// at s = -j is a trivial zero and is recorded under readings.
Certificate chow_certificate(const CMCurve& E, long d, long i, long p, int digits = 40);

struct HanGuo {
    Certificate han;  // ((k-1)! (2 pi/sqrt d_K)^j L(conj psi^(j+k), k) / Omega^(j+k))_p
    Certificate guo;  // ((2 pi)^2j |L(psi^(j+k), k) / Omega^(j+k)|^2)_p, ordinary p
};
HanGuo han_guo_bracket(const CMCurve& E, long j, long k, long p, int digits = 40);

// Recognition in K, retried after multiplying by sqrt|d_K|.
BracketEntry recognize_bracket(const std::string& name, const std::string& reading, const BigComplex& x,
                               int d, long p, int digits);

}  // namespace cmlab
