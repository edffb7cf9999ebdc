#include "doctest.h"

#include "cmlab/quadfield.hpp"

#include <numeric>
#include <set>

using namespace cmlab;

namespace {

QuadInt gauss(long x, long y) {
    // x + y*i in the (1, omega) basis of Q(i), omega = -2 + i.
    return QuadInt(-4, x + 2 * y, y);
}

}  // namespace

TEST_CASE("fields outside the class-number-one list are rejected") {
    CHECK_THROWS_AS(QuadField::get(-5), Error);
    CHECK_THROWS_AS(QuadField::get(-15), Error);
    for (int d : QuadField::discriminants()) {
        const auto& K = QuadField::get(d);
        size_t w = d == -3 ? 6 : d == -4 ? 4 : 2;
        CHECK(K.units().size() == w);
        for (const auto& u : K.units()) CHECK(u.norm() == 1);
    }
}

TEST_CASE("norm examples") {
    CHECK(gauss(2, 1).norm() == 5);
    CHECK(gauss(1, 1).norm() == 2);
    CHECK(gauss(0, 0).norm() == 0);
}

TEST_CASE("split_type examples") {
    const auto& K = QuadField::get(-4);
    auto s3 = split_type(K, 3);
    CHECK(s3.kind == SplitKind::Inert);
    auto s5 = split_type(K, 5);
    REQUIRE(s5.kind == SplitKind::Split);
    CHECK(s5.primes[0] == QuadIdeal(gauss(2, 1)));
    CHECK(s5.primes[1] == QuadIdeal(gauss(2, -1)));
    auto s2 = split_type(K, 2);
    REQUIRE(s2.kind == SplitKind::Ramified);
    CHECK(s2.primes[0] == QuadIdeal(gauss(1, 1)));
    CHECK_THROWS_AS(split_type(K, 15), Error);
}

TEST_CASE("gens_mod_units examples") {
    auto g = gens_mod_units(QuadIdeal(gauss(2, 1)));
    std::set<std::pair<long, long>> got;
    for (auto& x : g) got.insert({x.a.get_si() - 2 * x.b.get_si(), x.b.get_si()});
    std::set<std::pair<long, long>> want = {{2, 1}, {-2, -1}, {-1, 2}, {1, -2}};
    CHECK(got == want);
    CHECK(gens_mod_units(QuadIdeal::unit(-7)).size() == 2);
    CHECK(gens_mod_units(QuadIdeal(QuadInt(-3, 3, 0))).size() == 6);
    CHECK_THROWS_AS(gens_mod_units(QuadIdeal(QuadInt(-4, 0, 0))), Error);
}

TEST_CASE("canonical generator prefers the largest real part") {
    QuadIdeal I(gauss(-1, 2));
    CHECK(I.gen() == gauss(2, 1));
    QuadIdeal J(gauss(1, 1));
    CHECK(J.gen() == gauss(1, 1));
}

TEST_CASE("conjugation and norm are multiplicative (exhaustive box)") {
    for (int d : QuadField::discriminants()) {
        long B = d == -4 ? 20 : 5;
        for (long a = -B; a <= B; ++a)
            for (long b = -B; b <= B; ++b) {
                QuadInt x(d, a, b);
                CHECK(x.conj().conj() == x);
                CHECK(x.norm() >= 0);
                for (long c = -B; c <= B; c += (d == -4 ? 1 : 2))
                    for (long e = -B; e <= B; e += (d == -4 ? 1 : 2)) {
                        QuadInt y(d, c, e);
                        if ((x * y).norm() != x.norm() * y.norm()) {
                            FAIL("norm not multiplicative for d=" << d);
                        }
                    }
            }
    }
}

TEST_CASE("split_type agrees with the Legendre symbol for p < 500") {
    for (int d : QuadField::discriminants()) {
        const auto& K = QuadField::get(d);
        for (long p = 3; p < 500; p += 2) {
            if (!is_prime(p) || d % p == 0) continue;
            auto st = split_type(K, p);
            long leg = legendre(d, p);
            if (leg == 1) {
                REQUIRE(st.kind == SplitKind::Split);
                const QuadInt& g = st.primes[0].gen();
                CHECK(g * g.conj() == QuadInt(d, p, 0));
                CHECK(st.primes[1] == QuadIdeal(g.conj()));
                CHECK(st.primes[0] != st.primes[1]);
            } else {
                CHECK(st.kind == SplitKind::Inert);
            }
        }
    }
}

TEST_CASE("factor_ideal reassembles the ideal") {
    const auto& K = QuadField::get(-7);
    for (long a = -12; a <= 12; ++a)
        for (long b = -12; b <= 12; ++b) {
            QuadInt x(K.d(), a, b);
            if (x.is_zero()) continue;
            QuadIdeal I(x);
            QuadIdeal prod = QuadIdeal::unit(K.d());
            for (auto& f : factor_ideal(I))
                for (int e = 0; e < f.exponent; ++e) prod = prod * f.prime;
            CHECK(prod == I);
        }
}

TEST_CASE("ray_class_reps examples") {
    const auto& Ki = QuadField::get(-4);
    auto B = ray_class_reps(Ki, QuadIdeal(qpow(gauss(1, 1), 3)));
    REQUIRE(B.size() == 1);
    CHECK(B[0].is_unit_ideal());
    CHECK(ray_class_reps(Ki, QuadIdeal::unit(-4)).size() == 1);
    const auto& K7 = QuadField::get(-7);
    CHECK(ray_class_reps(K7, QuadIdeal(K7.sqrt_d())).size() == 3);
}

namespace {

// |(O/f)^x| by direct search for inverses modulo f.
long brute_unit_count(const QuadIdeal& f, std::vector<QuadInt>& units_out) {
    const long N = f.norm().get_si();
    std::vector<QuadInt> reps;
    for (long a = 0; a < N; ++a)
        for (long b = 0; b < N; ++b) {
            QuadInt x(f.d(), a, b);
            bool fresh = true;
            for (auto& r : reps)
                if (f.contains(x - r)) {
                    fresh = false;
                    break;
                }
            if (fresh) reps.push_back(x);
        }
    REQUIRE((long)reps.size() == N);
    for (auto& x : reps) {
        for (auto& y : reps)
            if (f.contains(x * y - QuadInt(f.d(), 1, 0))) {
                units_out.push_back(x);
                break;
            }
    }
    return (long)units_out.size();
}

}  // namespace

TEST_CASE("ray_class_reps size matches brute-force residue enumeration (small moduli)") {
    for (int d : {-3, -4, -7, -8, -11}) {
        const auto& K = QuadField::get(d);
        for (auto& f : ideals_up_to(K, 30)) {
            if (f.is_unit_ideal()) continue;
            std::vector<QuadInt> us;
            long phi = brute_unit_count(f, us);
            // Orbits of the global units acting on the unit residues.
            std::vector<char> seen(us.size(), 0);
            long orbits = 0;
            for (size_t i = 0; i < us.size(); ++i) {
                if (seen[i]) continue;
                ++orbits;
                for (auto& u : K.units()) {
                    QuadInt y = u * us[i];
                    for (size_t j = 0; j < us.size(); ++j)
                        if (f.contains(y - us[j])) seen[j] = 1;
                }
            }
            auto B = ray_class_reps(K, f);
            CHECK_MESSAGE((long)B.size() == orbits, "d=" << d << " f=" << f.str() << " phi=" << phi);
            ResidueRing R(f);
            for (auto& b : B) CHECK(R.is_unit(b.gen()));
        }
    }
}

TEST_CASE("ray_class_reps size matches the Euler-phi formula for N(f) <= 200") {
    for (int d : QuadField::discriminants()) {
        const auto& K = QuadField::get(d);
        for (auto& f : ideals_up_to(K, 200)) {
            if (f.is_unit_ideal()) continue;
            mpz_class phi = f.norm();
            for (auto& pf : factor_ideal(f)) {
                mpz_class np = pf.prime.norm();
                phi = phi / np * (np - 1);
            }
            long trivial = 0;
            for (auto& u : K.units())
                if (f.contains(u - QuadInt(d, 1, 0))) ++trivial;
            long expect = phi.get_si() * trivial / (long)K.units().size();
            CHECK((long)ray_class_reps(K, f).size() == expect);
        }
    }
}

TEST_CASE("residue ring reduction is canonical") {
    const auto& K = QuadField::get(-7);
    QuadIdeal f(QuadInt(-7, 3, 2));
    ResidueRing R(f);
    CHECK(R.size() == f.norm());
    for (long a = -20; a <= 20; ++a)
        for (long b = -20; b <= 20; ++b) {
            QuadInt x(K.d(), a, b);
            QuadInt r = R.reduce(x);
            CHECK(f.contains(x - r));
            CHECK(R.reduce(x + f.gen() * QuadInt(K.d(), a % 3, b % 5)) == r);
        }
}

TEST_CASE("ideals_up_to lists every ideal once") {
    const auto& K = QuadField::get(-4);
    auto I = ideals_up_to(K, 50);
    // Ideal counts of Z[i]: sum_{n<=50} r2(n)/4.
    long expect = 0;
    for (long n = 1; n <= 50; ++n) {
        long r = 0;
        for (long x = -8; x <= 8; ++x)
            for (long y = -8; y <= 8; ++y)
                if (x * x + y * y == n) ++r;
        expect += r / 4;
    }
    CHECK((long)I.size() == expect);
    for (size_t i = 1; i < I.size(); ++i) CHECK(I[i - 1].norm() <= I[i].norm());
}

TEST_CASE("coprimality matches the gcd of the ideals") {
    for (int d : {-4, -7, -8}) {
        const auto& K = QuadField::get(d);
        auto I = ideals_up_to(K, 40);
        for (const auto& a : I)
            for (const auto& b : I) {
                // Oracle: a and b are coprime iff some element of a + b is 1, i.e. no
                // prime ideal of norm <= 40 contains both generators.
                bool share = false;
                for (const auto& P : I)
                    if (!(P == QuadIdeal::unit(d)) && factor_ideal(P).size() == 1 && factor_ideal(P)[0].exponent == 1 &&
                        P.contains(a.gen()) && P.contains(b.gen()))
                        share = true;
                CHECK(coprime(a, b) == !share);
            }
    }
    CHECK(!coprime(QuadIdeal(QuadInt(-4, 2, 0)), QuadIdeal(QuadInt(-4, 1, 1))));
    // (2+i) = 4 + w and (2-i) = -w with w = -2+i.
    CHECK(coprime(QuadIdeal(QuadInt(-4, 4, 1)), QuadIdeal(QuadInt(-4, 0, -1))));
}

TEST_CASE("parse_quad_int examples") {
    CHECK(parse_quad_int(-4, "2+i") == QuadInt(-4, 4, 1));
    CHECK(parse_quad_int(-4, "(2 + i)") == parse_quad_int(-4, "2+i"));
    CHECK(parse_quad_int(-4, "-i") == QuadInt(-4, -2, -1));
    CHECK(parse_quad_int(-4, "7") == QuadInt::from_int(-4, 7));
    CHECK(parse_quad_int(-7, "(1+sqrt(-7))/2") == QuadInt(-7, 4, 1));
    CHECK(parse_quad_int(-7, "w") == QuadInt(-7, 0, 1));
    CHECK(parse_quad_int(-3, "3*sqrt(-3)") == QuadInt(-3, 9, 6));  // 6 w = -9 + 3 sqrt(-3)
    CHECK_THROWS_AS(parse_quad_int(-7, "i"), Error);
    CHECK_THROWS_AS(parse_quad_int(-7, "1/2"), Error);
    CHECK_THROWS_AS(parse_quad_int(-7, "(1+2*sqrt(-7))/2"), Error);
    CHECK_THROWS_AS(parse_quad_int(-4, ""), Error);
}

TEST_CASE("parse_quad_int inverts str") {
    for (int d : {-3, -4, -7, -8, -11, -19, -43, -67, -163})
        for (long a = -6; a <= 6; ++a)
            for (long b = -6; b <= 6; ++b) {
                QuadInt x(d, a, b);
                INFO(x.str());
                CHECK(parse_quad_int(d, x.str()) == x);
            }
}
