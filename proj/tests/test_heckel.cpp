#include "doctest.h"

#include "cmlab/curvedb.hpp"
#include "cmlab/error.hpp"
#include "cmlab/heckel.hpp"
#include "cmlab/parallel.hpp"
#include "cmlab/periods.hpp"

#include <numeric>

using namespace cmlab;

namespace {

const CurveDB& db() {
    static CurveDB d = CurveDB::load(CurveDB::default_path());
    return d;
}

// a_n by factoring every ideal of norm <= X (independent of the coefficient sweep).
std::vector<QuadInt> brute_coeffs(const CMCurve& E, unsigned k, bool conj, long X) {
    std::vector<QuadInt> a(static_cast<size_t>(X + 1), QuadInt(E.d, 0, 0));
    for (const auto& I : ideals_up_to(E.field(), X)) {
        if (!coprime(I, E.conductor_ideal())) continue;
        QuadInt v = E.psi().eval(I, k);
        a[static_cast<size_t>(I.norm().get_si())] = a[static_cast<size_t>(I.norm().get_si())] + (conj ? v.conj() : v);
    }
    return a;
}

}  // namespace

TEST_CASE("Dirichlet coefficients match the factorization route") {
    for (const char* label : {"E0", "E3", "E7", "E8", "E11"}) {
        const auto& E = db().get(label);
        for (unsigned k = 1; k <= 3; ++k)
            for (bool conj : {false, true}) {
                auto S = hecke_series(E, k, conj, false);
                auto a = S->coeffs(300);
                auto b = brute_coeffs(E, k, conj, 300);
                CAPTURE(label);
                CAPTURE(k);
                for (long n = 1; n <= 300; ++n) CHECK((*a)[n] == b[n]);
            }
    }
}

TEST_CASE("a_p of psi equals the point-count trace") {
    for (const auto& E : db().curves()) {
        auto S = hecke_series(E, 1, false, true);
        auto a = S->coeffs(400);
        for (long p = 5; p < 400; ++p) {
            if (!is_prime(p) || E.bad_prime(p) || !E.model_good_at(p)) continue;
            CAPTURE(E.label);
            CAPTURE(p);
            // Split: psi(P) + psi(conj P); inert: no ideal of norm p.
            CHECK((*a)[p] == QuadInt(E.d, count_points(E, p), 0));
        }
    }
}

TEST_CASE("primitive coefficients are multiplicative") {
    const auto& E = db().get("E0");
    for (unsigned k = 1; k <= 4; ++k) {
        auto a = hecke_series(E, k, false, true)->coeffs(200);
        for (long m = 1; m <= 14; ++m)
            for (long n = 1; m * n <= 200; ++n)
                if (std::gcd(m, n) == 1) CHECK((*a)[m * n] == (*a)[m] * (*a)[n]);
        // f_k = (1) for k = 4: the prime above 2 is unramified and psi^4((1+i)) = (1+i)^4 up to eps^4.
        if (k == 4) CHECK((*a)[2].norm() == 16);
    }
}

TEST_CASE("partial sums") {
    DigitsGuard g(60);
    const auto& E = db().get("E0");
    auto S = hecke_series(E, 1, true, false);
    CHECK(rel_diff(partial_sum(*S, BigComplex(1), 1), BigComplex(1)) < Real("1e-55"));
    // Truncation stability inside the region of absolute convergence.
    for (unsigned k = 1; k <= 3; ++k) {
        auto Sk = hecke_series(E, k, false, false);
        double sigma = k / 2.0 + 1 + 1.6;
        BigComplex s{Real(sigma)};
        for (long X : {1000L, 5000L}) {
            BigComplex a = partial_sum(*Sk, s, X), b = partial_sum(*Sk, s, 2 * X);
            CHECK(log10_abs((a - b).abs()) < direct_tail_log10(*Sk, sigma, X));
        }
    }
}

TEST_CASE("direct sum and smoothed sum agree") {
    DigitsGuard g(60);
    for (const char* label : {"E0", "E7", "E3"}) {
        const auto& E = db().get(label);
        for (unsigned k = 1; k <= 3; ++k) {
            BigComplex s(Real(9));
            LOptions d, a;
            d.method = LMethod::DirectSum;
            a.method = LMethod::ApproxFE;
            LValue ld = lvalue(E, k, false, s, 30, d);
            LValue la = lvalue(E, k, false, s, 60, a);
            CAPTURE(label);
            CAPTURE(k);
            CHECK(ld.method == LMethod::DirectSum);
            CHECK(ld.tail_log10 < -30);
            CHECK((ld.value - la.value).abs() < Real("1e-29"));
        }
    }
    // At s = 3, k = 3 the tail decays like X^-1/2: 40 digits are out of reach, and
    // the direct sum refuses instead of returning a truncated value.
    const auto& E0 = db().get("E0");
    LOptions d;
    d.method = LMethod::DirectSum;
    CHECK_THROWS_AS(lvalue(E0, 3, false, BigComplex(3), 40, d), Error);
    d.margin = 0.4;
    CHECK_THROWS_AS(lvalue(E0, 3, false, BigComplex(3), 40, d), Error);
    // What the direct sum does deliver there: agreement within its tail bound.
    auto S = hecke_series(E0, 3, false, true);
    BigComplex ps = partial_sum(*S, BigComplex(3), 20000);
    LValue la = lvalue(E0, 3, false, BigComplex(3), 60);
    CHECK(log10_abs((ps - la.value).abs()) < direct_tail_log10(*S, 3.0, 20000));
}

TEST_CASE("conjugation symmetry and reality over Q") {
    DigitsGuard g(60);
    BigComplex s(Real("1.3"), Real("0.7"));
    for (const char* label : {"E0", "E3"}) {
        const auto& E = db().get(label);
        for (unsigned k = 1; k <= 2; ++k) {
            BigComplex a = lvalue(E, k, false, s.conj(), 60).value;
            BigComplex b = lvalue(E, k, true, s, 60).value;
            CHECK(rel_diff(a, b.conj()) < Real("1e-55"));
        }
    }
    for (const char* label : {"E0", "E3", "E7", "E11"}) {
        const auto& E = db().get(label);
        for (unsigned k = 1; k <= 3; ++k) {
            LValue L = lvalue(E, k, false, BigComplex(Real(k)), 60);
            CAPTURE(label);
            CAPTURE(k);
            CHECK(abs(L.value.im) < Real("1e-30"));
        }
    }
    // E0, k = 1, s = 1 is real to 50 digits.
    LValue L1 = lvalue(db().get("E0"), 1, true, BigComplex(1), 60);
    CHECK(abs(L1.value.im) < Real("1e-50"));
    CHECK(L1.value.re > 0);
}

TEST_CASE("functional equation fit") {
    DigitsGuard g(60);
    const auto& E0 = db().get("E0");
    for (unsigned k = 1; k <= 3; ++k) {
        FECheck fe = verify_functional_equation(E0, k, Real(k + 1) / 2 + Real("0.3"), 60);
        CAPTURE(k);
        CHECK(fe.level == (k == 2 ? 16 : 32));
        CHECK(abs(fe.W.re - 1) < Real("1e-40"));
        CHECK(fe.W2_minus_1_log10 < -40);
        CHECK(fe.residual_log10 < -40);
        CHECK(abs(fe.slope + 1) < Real("1e-40"));
        CHECK(abs(fe.offset - Real(k + 1) / 2) < Real("1e-40"));
        CHECK(fe.fixed_form_log10 < -40);
        // The weight-independent exponent 1/2 - s does not fit.
        CHECK(fe.printed_form_log10 > -5);
    }
    CHECK_THROWS_AS(verify_functional_equation(E0, 2, Real("1.5"), 60), Error);
    // s1 and s2 = s1 + 0.2 symmetric about the center 1.
    CHECK_THROWS_AS(verify_functional_equation(E0, 1, Real("0.9"), 60), Error);
    // Root numbers: E8 and E163 have odd sign at k = 1.
    CHECK(abs(root_number(db().get("E8"), 1, false, 40).re + 1) < Real("1e-30"));
}

TEST_CASE("completed function: center and large s") {
    DigitsGuard g(60);
    const auto& E0 = db().get("E0");
    // Lambda at large s is the Gamma factor times 1 + O(5^-s).
    BigComplex s(Real(30));
    BigComplex lam = completed_lambda(E0, 2, false, s, 60);
    Real Q = sqrt(Real(16)) / (2 * real_pi());
    BigComplex ratio = lam / (BigComplex(pow(Q, Real(30))) * BigComplex(boost::multiprecision::tgamma(Real(30))));
    CHECK((ratio - BigComplex(1)).abs() < Real("1e-15"));
    // An odd sign forces a zero at the center.
    BigComplex c = completed_lambda(db().get("E8"), 1, false, BigComplex(1), 40);
    CHECK(c.abs() < Real("1e-30"));
    // Trivial zeros at Gamma poles.
    CHECK(lvalue(E0, 2, false, BigComplex(-1), 40).value.abs() == 0);
}

TEST_CASE("Damerell brackets on E0") {
    DigitsGuard g(60);
    const auto& E0 = db().get("E0");
    auto q1 = damerell_ratio(E0, 1, DamerellVariant::BracketQ, 60);
    CHECK(q1.a == mpq_class(1, 4));
    CHECK(q1.b == 0);
    CHECK(q1.residual < Real("1e-40"));
    auto k2 = damerell_ratio(E0, 2, DamerellVariant::BracketK, 60);
    auto k3 = damerell_ratio(E0, 3, DamerellVariant::BracketK, 60);
    CHECK(k2.a == mpq_class(1, 64));
    CHECK(k3.a == mpq_class(1, 256));
    for (long p : {3L, 7L, 11L, 19L}) {
        CHECK(padic_valuation(k2, p).v >= 0);
        CHECK(padic_valuation(k3, p).v >= 0);
    }
    // The squared reflection is rational; the (2 pi)^{2k-1} reading is not.
    Bracket dual = damerell_bracket(E0, 2, DamerellVariant::BracketDual, 60);
    CHECK(dual.alg.recognized);
    CHECK(dual.alg.is_rational());
    Bracket lit = damerell_bracket(E0, 2, DamerellVariant::BracketDualLiteral, 60);
    CHECK(!lit.alg.recognized);
    CHECK_THROWS_AS(damerell_ratio(E0, 2, DamerellVariant::BracketDualLiteral, 60), Error);
    // Rank one: the bracket is exactly zero.
    Bracket z = damerell_bracket(db().get("E8"), 1, DamerellVariant::BracketQ, 40);
    CHECK(z.zero);
    CHECK(padic_valuation(z.alg, 7).infinite);
}

TEST_CASE("recognition") {
    DigitsGuard g(60);
    auto r = recognize_rational(Real(22) / 7, mpz_class(1000), Real("1e-40"));
    REQUIRE(r);
    CHECK(*r == mpq_class(22, 7));
    Real s7 = sqrt(Real(7));
    BigComplex z(Real(1) / 3, Real(2) / 5 * s7);
    auto a = recognize_in_K(z, -7, 60, mpz_class(100000000));
    CHECK(a.recognized);
    CHECK(a.a == mpq_class(1, 3));
    CHECK(a.b == mpq_class(2, 5));
    CHECK(a.str() == "1/3 + 2/5*sqrt(-7)");
    auto bad = recognize_in_K(BigComplex(real_pi()), -4, 60, mpz_class(100000000));
    CHECK(!bad.recognized);
    CHECK(bad.residual > Real("1e-30"));
}

TEST_CASE("p-adic valuations") {
    CHECK(padic_valuation(mpq_class(9, 7), 3).str() == "3^2");
    CHECK(padic_valuation(mpq_class(9, 7), 7).str() == "7^-1");
    CHECK(padic_valuation(mpq_class(0), 5).infinite);
    CHECK(padic_valuation(mpq_class(0), 5).str() == "inf");
    AlgebraicInK x;
    x.d = -4;
    x.a = -1;
    x.b = 1;  // -1 + 2i = -1 + 1*sqrt(-4)
    CHECK(padic_valuation(x, 7).v == 0);
    CHECK_THROWS_AS(padic_valuation(x, 5), Error);
    x.a = 0;
    x.b = 7;  // 14i, norm 196
    CHECK(padic_valuation(x, 7).v == 1);
}

TEST_CASE("worker count does not change the bits") {
    DigitsGuard g(60);
    const auto& E = db().get("E7");
    set_worker_count(1);
    BigComplex a = lvalue(E, 2, false, BigComplex(Real("2.25")), 60).value;
    auto S = hecke_series(E, 1, false, false);
    BigComplex pa = partial_sum(*S, BigComplex(Real(4)), 30000);
    set_worker_count(4);
    BigComplex b = lvalue(E, 2, false, BigComplex(Real("2.25")), 60).value;
    BigComplex pb = partial_sum(*S, BigComplex(Real(4)), 30000);
    set_worker_count(1);
    CHECK(to_string(a, 75) == to_string(b, 75));
    CHECK(to_string(pa, 75) == to_string(pb, 75));
}

TEST_CASE("inputs made at a low default precision are promoted") {
    const auto& E0 = db().get("E0");
    Real s0;
    BigComplex s;
    {
        DigitsGuard low(15);
        s0 = Real(1) + Real("0.3");
        s = BigComplex(Real("2.5"));
    }
    CHECK(s0.precision() < 20);
    FECheck fe = verify_functional_equation(E0, 1, s0, 60);
    CHECK(fe.residual_log10 < -50);
    DigitsGuard g(60);
    BigComplex lo = lvalue(E0, 2, false, s, 50).value;
    BigComplex hi = lvalue(E0, 2, false, BigComplex(Real(5) / 2), 50).value;
    CHECK(log10_abs((lo - hi).abs()) < -45);
}
