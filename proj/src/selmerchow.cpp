#include "cmlab/selmerchow.hpp"

#include "cmlab/error.hpp"
#include "cmlab/periods.hpp"

#include <json.hpp>

namespace cmlab {

namespace {

std::string str(long x) { return std::to_string(x); }

CheckItem item(const std::string& name, bool pass, const std::string& value) { return {name, value, pass}; }

const CheckItem* first_failure(const std::vector<CheckItem>& items) {
    for (const auto& c : items)
        if (!c.pass) return &c;
    return nullptr;
}

Real factorial(long n) {
    Real r(1);
    for (long t = 2; t <= n; ++t) r *= t;
    return r;
}

// Verdict from the checklist and the primary (first) bracket.
void settle(Certificate& c) {
    if (const CheckItem* f = first_failure(c.checklist)) {
        c.verdict = Verdict::HypothesisFailed;
        c.reason = f->name;
        return;
    }
    if (c.brackets.empty()) {
        c.verdict = Verdict::Certified;
        return;
    }
    const BracketEntry& b = c.brackets.front();
    if (!b.recognized || !b.have_valuation) {
        c.verdict = Verdict::Inconclusive;
        c.reason = b.recognized ? b.note : "bracket not recognized: " + b.name;
        return;
    }
    c.verdict = Verdict::Certified;
}

Real omega_plus_z_norm_valuation(const CMCurve& E, long p, int digits, QuadInt* z_out) {
    PeriodLattice L = periods(E, std::max(digits, 30));
    if (z_out) *z_out = L.z;
    return Real(vp_int(L.z.norm(), p));
}

}  // namespace

bool chi_irreducible(long p, long k) { return k % (p + 1) != 0; }

bool chi_cyclotomic(long p, long k) { return (k - 1 - p) % (p * p - 1) == 0; }

std::vector<CheckItem> check_selmer_hypotheses(const CMCurve& E, long p, long k) {
    std::vector<CheckItem> out;
    bool prime = is_prime(p);
    out.push_back(item("p prime", prime, str(p)));
    out.push_back(item("p > k", p > k, str(p) + " > " + str(k)));
    out.push_back(item("p prime to 6", p % 2 != 0 && p % 3 != 0, str(p)));
    Reduction r = prime ? classify_reduction(E, p) : Reduction::Bad;
    out.push_back(item("supersingular at p", r == Reduction::Supersingular, prime ? reduction_name(r) : "n/a"));
    bool onto = prime && p > 3 && coprime(QuadIdeal(QuadInt::from_int(E.d, p)), E.conductor_ideal());
    out.push_back(item("p prime to 6f", onto, "f = " + E.conductor_ideal().str()));
    return out;
}

QuadIdeal find_twisting_ideal(const CMCurve& E, unsigned k, long p, long search_bound) {
    if (!is_prime(p)) throw Error(Errc::NotPrime, str(p));
    if (chi_cyclotomic(p, k))
        throw Error(Errc::CyclotomicObstruction, "psi^" + str(k) + " mod " + str(p) + " is cyclotomic");
    QuadIdeal bad = QuadIdeal(QuadInt::from_int(E.d, 6 * p)) * E.conductor_ideal();
    for (const auto& a : ideals_up_to(E.field(), search_bound)) {
        if (a.is_unit_ideal() || !coprime(a, bad)) continue;
        QuadInt x = QuadInt::from_int(E.d, a.norm()) - E.psi().eval(a, k);
        if (!x.is_zero() && vp_int(x.norm(), p) == 0) return a;
    }
    throw Error(Errc::SearchExhausted, "no twisting ideal of norm <= " + str(search_bound));
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "Certified";
        case Verdict::HypothesisFailed: return "HypothesisFailed";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

bool Certificate::checklist_passes() const { return first_failure(checklist) == nullptr; }

BracketEntry recognize_bracket(const std::string& name, const std::string& reading, const BigComplex& x, int d,
                               long p, int digits) {
    BracketEntry b;
    b.name = name;
    b.reading = reading;
    b.numeric = x;
    const mpz_class bound(100000000);
    b.alg = recognize_in_K(x, d, digits, bound);
    if (!b.alg.recognized) {
        AlgebraicInK alt = recognize_in_K(x * sqrt(Real(-d)), d, digits, bound);
        if (alt.recognized) {
            b.alg = alt;
            b.normalization = "sqrt|d_K|";
        }
    }
    b.recognized = b.alg.recognized;
    if (!b.recognized) return b;
    if (p % d == 0 && !b.normalization.empty()) {
        b.note = "sqrt|d_K| is not a unit at p";
        return b;
    }
    try {
        b.valuation = padic_valuation(b.alg, p);
        b.have_valuation = true;
    } catch (const Error& e) {
        b.note = e.what();
    }
    return b;
}

std::string certificate_json(const Certificate& c, int indent) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["schema_version"] = Certificate::schema_version;
    j["curve"] = c.curve;
    j["theorem"] = c.theorem;
    j["p"] = c.p;
    ordered_json params = ordered_json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    j["params"] = params;
    ordered_json checks = ordered_json::array();
    for (const auto& it : c.checklist) checks.push_back({{"name", it.name}, {"value", it.value}, {"pass", it.pass}});
    j["checklist"] = checks;
    ordered_json br = ordered_json::array();
    for (const auto& b : c.brackets) {
        ordered_json e;
        e["name"] = b.name;
        e["reading"] = b.reading;
        e["numeric"] = to_string(b.numeric, 25);
        e["recognized"] = b.recognized;
        e["value"] = b.recognized ? ordered_json(b.alg.str()) : ordered_json(nullptr);
        e["normalization"] = b.normalization;
        e["valuation"] = b.have_valuation ? ordered_json(b.valuation.str()) : ordered_json(nullptr);
        e["note"] = b.note;
        br.push_back(e);
    }
    j["brackets"] = br;
    j["predicted_order"] = c.predicted_order.empty() ? ordered_json(nullptr) : ordered_json(c.predicted_order);
    j["finite"] = c.finite ? ordered_json(*c.finite) : ordered_json(nullptr);
    j["verdict"] = verdict_name(c.verdict);
    j["reason"] = c.reason;
    ordered_json rd = ordered_json::object();
    for (const auto& [k, v] : c.readings) rd[k] = v;
    j["readings"] = rd;
    return j.dump(indent);
}

const char* selmer_variant_name(SelmerVariant v) {
    switch (v) {
        case SelmerVariant::OverK: return "K";
        case SelmerVariant::OverQ: return "Q";
        case SelmerVariant::OverQDual: return "Q-dual";
        case SelmerVariant::OverKDual: return "K-dual";
    }
    return "?";
}

SelmerVariant parse_selmer_variant(const std::string& s) {
    for (auto v : {SelmerVariant::OverK, SelmerVariant::OverQ, SelmerVariant::OverQDual, SelmerVariant::OverKDual})
        if (s == selmer_variant_name(v)) return v;
    throw Error(Errc::InvalidArgument, "unknown variant " + s + " (K, Q, Q-dual, K-dual)");
}

Certificate predicted_selmer_order(const CMCurve& E, unsigned k, long p, SelmerVariant v, int digits) {
    Certificate c;
    c.curve = E.label;
    c.theorem = std::string("selmer-order/") + selmer_variant_name(v);
    c.p = p;
    c.params = {{"k", static_cast<long>(k)}};
    c.checklist = check_selmer_hypotheses(E, p, k);
    bool overQ = v == SelmerVariant::OverQ || v == SelmerVariant::OverQDual;
    QuadInt z;
    if (overQ) {
        c.checklist.push_back(item("defined over Q", E.defined_over_Q, E.defined_over_Q ? "yes" : "no"));
        if (is_prime(p)) {
            Real vz = omega_plus_z_norm_valuation(E, p, digits, &z);
            c.checklist.push_back(item("p prime to z, Omega_+ = z Omega", vz == 0, "z = " + z.str()));
        }
    }
    if (!is_prime(p)) {
        settle(c);
        return c;
    }

    DigitsGuard g(digits + 20);
    auto add = [&](DamerellVariant dv, const std::string& reading) {
        Bracket b = damerell_bracket(E, k, dv, digits);
        c.brackets.push_back(recognize_bracket(variant_name(dv), reading, b.numeric, E.d, p, digits));
        return b;
    };
    switch (v) {
        case SelmerVariant::OverK: add(DamerellVariant::BracketK, "primary"); break;
        case SelmerVariant::OverQ: {
            Bracket b = add(DamerellVariant::BracketQ, "primary");
            // The same value over Omega^k instead of Omega_+^k.
            BigComplex alt = b.numeric * cpow(z.to_complex(), static_cast<long>(k));
            c.brackets.push_back(recognize_bracket("L(conj psi^k, k)/Omega^k", "K-period", alt, E.d, p, digits));
            break;
        }
        case SelmerVariant::OverQDual: add(DamerellVariant::BracketQDual, "primary"); break;
        case SelmerVariant::OverKDual:
            add(DamerellVariant::BracketDual, "primary");
            add(DamerellVariant::BracketDualLiteral, "literal");
            break;
    }

    const BracketEntry& b = c.brackets.front();
    bool zero = b.recognized && b.alg.is_zero();
    c.finite = k >= 2 ? true : !zero;
    if (b.have_valuation) c.predicted_order = b.valuation.str();
    settle(c);
    if (c.verdict == Verdict::Certified && zero && k >= 2) {
        c.verdict = Verdict::Inconclusive;
        c.reason = "zero bracket where the group is finite";
    }
    return c;
}

ChowConditions chow_conditions(long p, long i, Reduction reduction, long d) {
    if (i < 1) throw Error(Errc::InvalidArgument, "i must be positive");
    if (reduction == Reduction::Bad) throw Error(Errc::InvalidArgument, "conditions need good reduction");
    ChowConditions r;
    r.p = p;
    r.i = i;
    r.d = d > 0 ? d : i;
    r.reduction = reduction;
    r.all_pass = r.all_pass_variant = true;
    for (long n = 0; n < i; ++n) {
        ChowCondition c;
        c.n = n;
        if (reduction == Reduction::Supersingular) {
            c.value = n + 1 + p * (n - 1);
            c.modulus = p * p - 1;
            c.pass = c.pass_variant = c.value % c.modulus != 0;
        } else {
            c.value = 2 * n;
            c.modulus = p - 1;
            c.pass = c.value % c.modulus != 0;
            c.pass_variant = n == 0 || c.pass;
        }
        r.all_pass = r.all_pass && c.pass;
        r.all_pass_variant = r.all_pass_variant && c.pass_variant;
        r.entries.push_back(c);
    }
    r.sufficient = p > 2 * r.d + 1;
    return r;
}

Certificate chow_certificate(const CMCurve& E, long d, long i, long p, int digits) {
    Certificate c;
    c.curve = E.label;
    c.theorem = "chow-torsion";
    c.p = p;
    c.params = {{"d", d}, {"i", i}};
    bool prime = is_prime(p);
    c.checklist.push_back(item("p prime", prime, str(p)));
    c.checklist.push_back(item("p > 3", p > 3, str(p)));
    bool good = prime && !E.bad_prime(p);
    c.checklist.push_back(item("good reduction at p", good, good ? "good" : "bad"));
    c.checklist.push_back(item("p > 2i + 1", p > 2 * i + 1, str(p) + " > " + str(2 * i + 1)));
    c.checklist.push_back(item("p > d", p > d, str(p) + " > " + str(d)));
    c.checklist.push_back(item("1 <= i <= d", 1 <= i && i <= d, "i = " + str(i)));
    bool onto = prime && p > 3 && coprime(QuadIdeal(QuadInt::from_int(E.d, p)), E.conductor_ideal());
    c.checklist.push_back(item("p prime to 6f", onto, "f = " + E.conductor_ideal().str()));
    if (good && i >= 1) {
        Reduction red = classify_reduction(E, p);
        ChowConditions cc = chow_conditions(p, i, red, d);
        std::string vals;
        for (const auto& e : cc.entries) {
            if (!vals.empty()) vals += ", ";
            vals += str(e.modulus) + (e.pass_variant ? " !| " : " | ") + str(e.value);
        }
        if (red == Reduction::Supersingular) {
            c.checklist.push_back(item("supersingular conditions, 0 <= n < i", cc.all_pass, vals));
        } else {
            c.checklist.push_back(item("ordinary conditions, 1 <= n < i", cc.all_pass_variant, vals));
            c.readings.push_back({"ordinary conditions including n = 0",
                                  "HypothesisFailed: p - 1 divides 2n = 0 for every p"});
        }
    }
    if (!c.checklist_passes()) {
        settle(c);
        return c;
    }

    DigitsGuard g(digits + 20);
    PeriodLattice L = periods(E, std::max(digits, 30));
    Real two_pi = 2 * real_pi();
    for (long j = 1; j < i; ++j) {
        unsigned k = static_cast<unsigned>(2 * j);
        BigComplex val = lvalue(E, k, false, BigComplex(Real(j)), digits).value;
        BigComplex x = cpow(BigComplex(two_pi), j) * val / cpow(L.omega, 2 * j);
        BracketEntry crit = recognize_bracket("(2 pi)^j L(psi^2j, j)/Omega^2j", "critical", x, E.d, p, digits);
        c.brackets.push_back(crit);
    }
    for (long j = 1; j < i; ++j) {
        BracketEntry lit;
        lit.name = "(2 pi)^j L(psi^2j, -j)/Omega^2j";
        lit.reading = "literal";
        lit.recognized = true;
        lit.alg.d = E.d;
        lit.alg.recognized = true;
        lit.have_valuation = true;
        lit.valuation.p = p;
        lit.valuation.infinite = true;
        lit.note = "trivial zero: Gamma(s) has a pole at s = -" + str(j);
        c.brackets.push_back(lit);
        BigComplex zj = cpow(L.z.to_complex(), 2 * j);
        const BracketEntry& crit = c.brackets[static_cast<size_t>(j - 1)];
        c.brackets.push_back(
            recognize_bracket("(2 pi)^j L(psi^2j, j)/Omega_+^2j", "critical, Omega_+", crit.numeric / zj, E.d, p, digits));
    }

    c.verdict = Verdict::Certified;
    for (long j = 1; j < i; ++j) {
        const BracketEntry& b = c.brackets[static_cast<size_t>(j - 1)];
        if (!b.recognized || !b.have_valuation) {
            c.verdict = Verdict::Inconclusive;
            c.reason = "j = " + str(j) + ": " + (b.recognized ? b.note : "value not recognized");
            break;
        }
        if (b.valuation.infinite || b.valuation.v != 0) {
            c.verdict = Verdict::HypothesisFailed;
            c.reason = "j = " + str(j) + ": p divides the L-value (" + b.valuation.str() + ")";
            break;
        }
    }
    c.readings.push_back({"literal L-value at s = -j",
                          i >= 2 ? "HypothesisFailed: the value is 0, so p divides it"
                                 : std::string(verdict_name(c.verdict))});
    return c;
}

HanGuo han_guo_bracket(const CMCurve& E, long j, long k, long p, int digits) {
    HanGuo out;
    bool prime = is_prime(p);
    Reduction red = prime ? classify_reduction(E, p) : Reduction::Bad;
    const long n = j + k;
    Real two_pi = 2 * real_pi();

    Certificate& h = out.han;
    h.curve = E.label;
    h.theorem = "han-bracket";
    h.p = p;
    h.params = {{"j", j}, {"k", k}};
    h.checklist.push_back(item("p prime", prime, str(p)));
    h.checklist.push_back(item("p > 3", p > 3, str(p)));
    h.checklist.push_back(item("j >= 0", j >= 0, str(j)));
    h.checklist.push_back(item("k > j + 1", k > j + 1, str(k) + " > " + str(j + 1)));
    if (red == Reduction::Supersingular) {
        long m = p * p - 1, e = k + p * j;
        h.checklist.push_back(item("local character nontrivial", e % m != 0, str(m) + " !| " + str(e)));
    } else if (red == Reduction::Ordinary) {
        long m = p - 1, e = k + j;
        h.checklist.push_back(item("local character nontrivial", e % m != 0, str(m) + " !| " + str(e)));
    } else {
        h.checklist.push_back(item("local character nontrivial", false, "not evaluated at a bad prime"));
    }
    if (h.checklist_passes()) {
        DigitsGuard g(digits + 20);
        PeriodLattice L = periods(E, std::max(digits, 30));
        LOptions opt;
        BigComplex Lp = lvalue(E, static_cast<unsigned>(n), true, BigComplex(Real(k)), digits, opt).value;
        opt.primitive = false;
        BigComplex Li = lvalue(E, static_cast<unsigned>(n), true, BigComplex(Real(k)), digits, opt).value;
        BigComplex c2 = BigComplex(two_pi) / csqrt(BigComplex(Real(E.d)));
        BigComplex base = factorial(k - 1) / cpow(L.omega, n);
        h.brackets.push_back(recognize_bracket("(k-1)! (2 pi/sqrt d_K)^j L(conj psi^(j+k), k)/Omega^(j+k)", "power j",
                                               base * cpow(c2, j) * Lp, E.d, p, digits));
        h.brackets.push_back(recognize_bracket("(k-1)! (2 pi/sqrt d_K) L(conj psi^(j+k), k)/Omega^(j+k)", "literal",
                                               base * c2 * Lp, E.d, p, digits));
        h.brackets.push_back(recognize_bracket("(k-1)! (2 pi/sqrt d_K)^j L_f(conj psi^(j+k), k)/Omega^(j+k)",
                                               "imprimitive", base * cpow(c2, j) * Li, E.d, p, digits));
        h.finite = true;
        if (h.brackets.front().have_valuation) h.predicted_order = h.brackets.front().valuation.str();
    }
    settle(h);

    Certificate& q = out.guo;
    q.curve = E.label;
    q.theorem = "guo-bracket";
    q.p = p;
    q.params = {{"j", j}, {"k", k}};
    q.checklist.push_back(item("p prime", prime, str(p)));
    q.checklist.push_back(item("ordinary at p", red == Reduction::Ordinary, prime ? reduction_name(red) : "n/a"));
    q.checklist.push_back(item("p > k + 1", p > k + 1, str(p) + " > " + str(k + 1)));
    q.checklist.push_back(item("0 < j < k", 0 < j && j < k, "j = " + str(j)));
    if (q.checklist_passes()) {
        DigitsGuard g(digits + 20);
        PeriodLattice L = periods(E, std::max(digits, 30));
        BigComplex Lk = lvalue(E, static_cast<unsigned>(n), false, BigComplex(Real(k)), digits).value;
        BigComplex Lb = lvalue(E, static_cast<unsigned>(n), true, BigComplex(Real(k)), digits).value;
        BigComplex prod = Lk * Lb / (cpow(L.omega, n) * cpow(L.omega.conj(), n));
        q.brackets.push_back(recognize_bracket("(2 pi)^2j L(psi^(j+k), k) L(conj psi^(j+k), k)/|Omega|^2(j+k)",
                                               "power 2j", prod * cpow(BigComplex(two_pi), 2 * j), E.d, p, digits));
        q.brackets.push_back(recognize_bracket("(2 pi)^j L(psi^(j+k), k) L(conj psi^(j+k), k)/|Omega|^2(j+k)",
                                               "literal", prod * cpow(BigComplex(two_pi), j), E.d, p, digits));
        q.finite = true;
        if (q.brackets.front().have_valuation) q.predicted_order = q.brackets.front().valuation.str();
    }
    settle(q);
    return out;
}

}  // namespace cmlab
