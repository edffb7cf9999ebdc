#include "doctest.h"

#include "cmlab/cmcurve.hpp"
#include "cmlab/curvedb.hpp"

#include <sstream>

using namespace cmlab;

namespace {

const CurveDB& db() {
    static CurveDB d = CurveDB::load(CurveDB::default_path());
    return d;
}

QuadInt gauss(long x, long y) { return QuadInt(-4, x + 2 * y, y); }

// Naive #E(F_p) by testing every (x, y).
long naive_ap(const CMCurve& E, long p) {
    auto red = [p](const mpq_class& q) {
        mpz_class n = q.get_num() % p, d = q.get_den() % p, inv;
        if (n < 0) n += p;
        mpz_class P(p);
        mpz_invert(inv.get_mpz_t(), d.get_mpz_t(), P.get_mpz_t());
        return mpz_class(n * inv % p).get_si();
    };
    long a = red(E.A), b = red(E.B);
    long count = 1;
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y)
            if ((y * y - (x * x * x + a * x + b)) % p == 0) ++count;
    return p + 1 - count;
}

}  // namespace

TEST_CASE("bundled database loads") {
    CHECK(db().curves().size() == 9);
    for (const auto& E : db().curves()) {
        CHECK(E.j_invariant() == cm_j_invariant(E.d));
        CHECK(E.discriminant() != 0);
    }
}

TEST_CASE("load_curve examples") {
    CurveRecord r{"E0", -4, "-1", "0", 2, 2, true, 32};
    CHECK_NOTHROW(load_curve(r));
    CurveRecord bad{"X", -4, "0", "1", 2, 2, true, {}};
    try {
        load_curve(bad);
        FAIL("expected NotCM");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotCM);
    }
    CurveRecord sing{"S", -4, "0", "0", 2, 2, true, {}};
    try {
        load_curve(sing);
        FAIL("expected SingularModel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularModel);
    }
}

TEST_CASE("wrong conductors are rejected") {
    // (2) is too small for y^2 = x^3 - x, (4) is not the conductor of psi.
    for (auto [a, b] : std::vector<std::pair<long, long>>{{2, 0}, {4, 0}, {1, 0}}) {
        CurveRecord r{"E0", -4, "-1", "0", a, b, true, {}};
        try {
            load_curve(r);
            FAIL("expected ConductorMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::ConductorMismatch);
        }
    }
    CurveRecord r{"E0", -4, "-1", "0", 2, 2, true, 64};
    CHECK_THROWS_AS(load_curve(r), Error);
}

TEST_CASE("count_points examples and brute-force oracle") {
    const auto& E0 = db().get("E0");
    CHECK(count_points(E0, 5) == -2);
    CHECK(count_points(E0, 7) == 0);
    CHECK(count_points(E0, 13) == 6);
    CHECK_THROWS_AS(count_points(E0, 2), Error);
    for (const auto& E : db().curves())
        for (long p = 5; p < 150; ++p) {
            if (!is_prime(p) || !E.model_good_at(p)) continue;
            long ap = count_points(E, p);
            CHECK(ap == naive_ap(E, p));
            CHECK(ap * ap <= 4 * p);
        }
}

TEST_CASE("grossencharacter examples") {
    const auto& E0 = db().get("E0");
    const auto& psi = E0.psi();
    CHECK(psi.at_prime(QuadIdeal(gauss(2, 1))) == gauss(-1, 2));
    CHECK(psi.at_prime(QuadIdeal(gauss(3, 0))) == gauss(-3, 0));
    CHECK(psi.at_prime(QuadIdeal(gauss(3, 2))) == gauss(3, 2));
    QuadIdeal a(gauss(2, 1));
    CHECK(psi.eval(a * a, 1) == gauss(-3, -4));
    CHECK(psi.eval(QuadIdeal::unit(-4), 5) == gauss(1, 0));
    CHECK(psi.eval(a, 2) == gauss(-3, -4));
    CHECK_THROWS_AS(psi.eval(QuadIdeal(gauss(1, 1)), 1), Error);
    CHECK_THROWS_AS(psi.at_prime(QuadIdeal(gauss(1, 1))), Error);
}

TEST_CASE("psi invariants at good primes below 10^4") {
    for (const auto& E : db().curves()) {
        const auto& psi = E.psi();
        const auto& K = E.field();
        for (long p = 5; p < 10000; ++p) {
            if (!is_prime(p) || E.bad_prime(p)) continue;
            auto st = split_type(K, p);
            if (st.kind == SplitKind::Split) {
                QuadInt v0 = psi.at_prime(st.primes[0]);
                QuadInt v1 = psi.at_prime(st.primes[1]);
                CHECK(v0.norm() == p);
                CHECK(st.primes[0].contains(v0));
                CHECK(v1 == v0.conj());
                CHECK(psi.eval_fast(st.primes[0].gen()) == v0);
            } else if (st.kind == SplitKind::Inert) {
                QuadInt v = psi.at_prime(st.primes[0]);
                CHECK(v * v == QuadInt(E.d, p * p, 0));
                CHECK(v == QuadInt(E.d, -p, 0));
                if (E.model_good_at(p)) {
                    CHECK(classify_reduction(E, p) == Reduction::Supersingular);
                    CHECK(count_points(E, p) == 0);
                }
            }
        }
    }
}

TEST_CASE("fast and factorization-based psi agree") {
    for (const auto& E : db().curves()) {
        const auto& K = E.field();
        for (const auto& I : ideals_up_to(K, 400)) {
            if (!coprime(I, E.conductor_ideal())) continue;
            CHECK(E.psi().eval(I, 1) == E.psi().eval_fast(I.gen()));
            CHECK(E.psi().eval(I, 3) == qpow(E.psi().eval_fast(I.gen()), 3));
        }
    }
}

TEST_CASE("conductor of powers of the character") {
    const auto& psi = db().get("E0").psi();
    CHECK(psi.conductor_of_power(1) == QuadIdeal(qpow(gauss(1, 1), 3)));
    CHECK(psi.conductor_of_power(2) == QuadIdeal(gauss(2, 0)));
    CHECK(psi.conductor_of_power(4).is_unit_ideal());
    // For |units| = 2 the even powers are unramified away from the character's
    // odd part only when eps^2 = 1.
    const auto& psi7 = db().get("E7").psi();
    CHECK(psi7.conductor_of_power(2).is_unit_ideal());
}

TEST_CASE("classify_reduction examples") {
    const auto& E0 = db().get("E0");
    CHECK(classify_reduction(E0, 7) == Reduction::Supersingular);
    CHECK(classify_reduction(E0, 5) == Reduction::Ordinary);
    CHECK(classify_reduction(E0, 2) == Reduction::Bad);
}

TEST_CASE("ingest reports line numbers") {
    std::istringstream ok("");
    CHECK(CurveDB::parse(ok).empty());
    std::istringstream in(
        "{\"label\": \"E0\", \"d_K\": -4, \"A\": \"-1\", \"B\": \"0\", \"cond_gen\": [2, 2], \"defined_over_Q\": true}\n"
        "{\"label\": \"Z\", \"d_K\": -4, \"A\": \"0\", \"B\": \"0\", \"cond_gen\": [2, 2], \"defined_over_Q\": true}\n");
    try {
        CurveDB::parse(in, "mem");
        FAIL("expected SingularModel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularModel);
        CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
    }
    std::istringstream junk("{\"label\": \n");
    try {
        CurveDB::parse(junk, "mem");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParseError);
        CHECK(std::string(e.what()).find("mem:1") != std::string::npos);
    }
    std::istringstream dup(
        "{\"label\": \"E0\", \"d_K\": -4, \"A\": \"-1\", \"B\": \"0\", \"cond_gen\": [2, 2], \"defined_over_Q\": true}\n"
        "{\"label\": \"E0\", \"d_K\": -4, \"A\": \"-1\", \"B\": \"0\", \"cond_gen\": [2, 2], \"defined_over_Q\": true}\n");
    CHECK_THROWS_AS(CurveDB::parse(dup), Error);
}
