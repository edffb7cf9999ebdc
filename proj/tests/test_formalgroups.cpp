#include "doctest.h"

#include "cmlab/curvedb.hpp"
#include "cmlab/error.hpp"
#include "cmlab/formalgroups.hpp"

#include <random>

using namespace cmlab;

namespace {

const CurveDB& db() {
    static CurveDB d = CurveDB::load(CurveDB::default_path());
    return d;
}

// Every true coefficient of a - b has valuation >= n.
bool congruent(const PadicSeries& a, const PadicSeries& b, int n) {
    PadicSeries d = a - b;
    for (size_t i = 0; i < d.size(); ++i)
        if (d.coeff_valuation(i) < n) return false;
    return true;
}

// [2](t) on y^2 = x^3 + A x + B from the duplication formula, with X = t^2 x, Y = t^3 y:
// X2 = ((3X^2 + A t^4)^2 - 8 X Y^2) / (4 Y^2), Y2 = (3X^2 + A t^4)(X - X2)/(2Y) - Y,
// [2](t) = -t X2 / Y2.
PadicSeries doubling_oracle(const CMCurve& E, const PadicCtx* ctx, size_t M) {
    const size_t L = M + 3;
    auto I = [&](long v) { return PadicElem::from_int(ctx, v); };
    PadicElem A = PadicElem::from_mpq(ctx, E.A), B = PadicElem::from_mpq(ctx, E.B);
    PadicSeries t = PadicSeries::variable(ctx, L), w = t * t * t;
    for (size_t i = 0; i < L; ++i) w = t * t * t + (t * w * w) * A + (w * w * w) * B;
    PadicSeries U(ctx, M);
    for (size_t j = 0; j < M; ++j) U[j] = w[j + 3];
    PadicSeries X = U.inverse(), Y = -X;
    PadicSeries tm = PadicSeries::variable(ctx, M);
    PadicSeries t4 = tm * tm * tm * tm;
    PadicSeries num = X * X * I(3) + t4 * A;
    PadicSeries X2 = (num * num - X * Y * Y * I(8)) * (Y * Y * I(4)).inverse();
    PadicSeries Y2 = num * (X - X2) * (Y * I(2)).inverse() - Y;
    return -(tm * X2 * Y2.inverse());
}

PadicSeries one_series(const PadicCtx* ctx, size_t M) { return PadicSeries::constant(PadicElem::from_int(ctx, 1), M); }

}  // namespace

TEST_CASE("Weierstrass formal logarithm of E0 at 7") {
    const auto& E0 = db().get("E0");
    FormalGroupData fg = weierstrass_formal_log(E0, 7, 8, 40);
    const PadicCtx* ctx = fg.ctx();
    CHECK(fg.log_prime[0] == PadicElem::from_int(ctx, 1));
    CHECK(fg.log_prime.denom() == 0);
    CHECK(fg.log.coeff_valuation(1) == 0);
    // lambda' = 1 + 2A t^4 + ... for y^2 = x^3 + A x + B.
    CHECK(fg.log_prime[4] == PadicElem::from_mpq(ctx, 2 * E0.A));
    for (size_t n : {1, 2, 3, 5}) CHECK(fg.log_prime[n].is_zero());
    // lambda has 7 in the denominator at t^7 (coefficient of t^6 in lambda' is not divisible by 7).
    CHECK(fg.log.coeff_valuation(7) >= -1);

    PadicSeries two = doubling_oracle(E0, fg.work, 40);
    PadicSeries lhs = fg.log.compose(two);
    PadicSeries rhs = fg.log * PadicElem::from_int(fg.work, 2);
    CHECK(congruent(lhs, rhs, 8));
    CHECK(fg.mult(2) == doubling_oracle(E0, ctx, 40));
    CHECK(fg.mult(1) == PadicSeries::variable(ctx, 40));
    CHECK(fg.mult(-1).compose(fg.mult(-1)) == PadicSeries::variable(ctx, 40));
}

TEST_CASE("group law through the logarithm") {
    const auto& E0 = db().get("E0");
    FormalGroupData fg = weierstrass_formal_log(E0, 7, 6, 24);
    const PadicCtx* ctx = fg.ctx();
    PadicSeries X = PadicSeries::variable(ctx, 24);
    for (long m = 1; m <= 4; ++m)
        for (long n = 1; n <= 4; ++n) {
            CAPTURE(m);
            CAPTURE(n);
            CHECK(fg.mult(m).compose(fg.mult(n)) == fg.mult(m * n));
        }
    // F(X, uX) stays integral; F(X, 0) = X; F(X, X) = [2](X).
    for (long u : {1, 2, 3, -1, 5}) CHECK_NOTHROW(fg.add(X, X * PadicElem::from_int(ctx, u)));
    CHECK(fg.add(X, PadicSeries(ctx, 24)) == X);
    CHECK(fg.add(X, X) == fg.mult(2));
    // F(X, [-1]X) = 0.
    CHECK(fg.add(X, fg.mult(-1)).is_zero());

    PadicElem pi = PadicElem::from_int(padic_ctx(3, 6), 3);
    FormalGroupData lt = lubin_tate(pi, 3, 6, 12);
    PadicSeries Z = PadicSeries::variable(lt.ctx(), 12);
    for (long m = 1; m <= 4; ++m)
        for (long n = 1; n <= 4; ++n) CHECK(lt.mult(m).compose(lt.mult(n)) == lt.mult(m * n));
    for (long u : {1, 2, 4}) CHECK_NOTHROW(lt.add(Z, Z * PadicElem::from_int(lt.ctx(), u)));
}

TEST_CASE("[p] and the height of the reduction") {
    const auto& E0 = db().get("E0");
    MultByP m7 = mult_by_p(weierstrass_formal_log(E0, 7, 4, 51));
    CHECK(m7.unit_degree == 49);
    CHECK(m7.height == 2);
    CHECK(m7.have_series);
    CHECK(m7.series_agrees);
    // [7](t) = 7 t + ... : the linear coefficient is p.
    CHECK(m7.series[1] == PadicElem::from_int(padic_ctx(7, 4), 7));
    MultByP m5 = mult_by_p(weierstrass_formal_log(E0, 5, 4, 27));
    CHECK(m5.unit_degree == 5);
    CHECK(m5.height == 1);
    CHECK(m5.series_agrees);
    CHECK_THROWS_AS(mult_by_p(weierstrass_formal_log(E0, 7, 4, 49)), Error);
    CHECK_THROWS_AS(weierstrass_formal_log(E0, 3, 4, 20), Error);
    CHECK_THROWS_AS(weierstrass_formal_log(db().get("E7"), 7, 4, 20), Error);
}

TEST_CASE("height agrees with the reduction type for every curve and p < 50") {
    for (const auto& E : db().curves())
        for (long p = 5; p < 50; ++p) {
            if (!is_prime(p) || E.bad_prime(p) || !E.model_good_at(p)) continue;
            CAPTURE(E.label);
            CAPTURE(p);
            long deg = reduction_unit_degree(E, p, static_cast<size_t>(p * p + 2));
            Reduction r = classify_reduction(E, p);
            CHECK(deg == (r == Reduction::Supersingular ? p * p : p));
        }
}

TEST_CASE("Lubin-Tate group for p = 3, pi = 3") {
    const PadicCtx* c = padic_ctx(3, 10);
    PadicElem pi = PadicElem::from_int(c, 3);
    FormalGroupData lt = lubin_tate(pi, 3, 10, 20);
    // lambda_9 = 1/(3 - 3^9)
    CHECK(lt.log.coeff_valuation(9) == -1);
    PadicElem scaled = lt.log[9] * PadicElem::from_int(lt.work, 3 - 19683);
    CHECK(scaled == PadicElem(lt.work, mpz_class(1)) * PadicElem::from_int(lt.work, 3).pow(lt.log.denom()));
    for (size_t n = 2; n <= 8; ++n) CHECK(lt.exp.coeff_valuation(n) >= 10);
    for (size_t n = 2; n <= 8; ++n) CHECK(lt.log_prime[n - 1].is_zero());
    // [pi](X) = pi X + X^9.
    PadicSeries X = PadicSeries::variable(c, 20);
    PadicSeries X9 = X * X * X * X * X * X * X * X * X;
    CHECK(lt.mult(3) == X * pi + X9);
    // [zeta](X) = zeta X on mu_8.
    for (PadicElem z0 : {PadicElem::from_int(lt.work, 2), PadicElem::from_int(lt.work, 1, 1), PadicElem::from_int(lt.work, 0, 1)}) {
        PadicElem zeta = teichmuller(z0);
        CHECK(lt.apply(zeta) == X * zeta.to_ctx(c));
    }
    CHECK_THROWS_AS(lubin_tate(PadicElem::from_int(c, 9), 3, 10, 20), Error);
    CHECK_THROWS_AS(lubin_tate(pi, 3, 10, 9), Error);
    // A uniformizer outside Z_p.
    PadicElem pi2 = PadicElem::from_int(c, 3, 3) * PadicElem::from_int(c, 1, 1);
    FormalGroupData lt2 = lubin_tate(pi2, 3, 10, 20);
    CHECK(lt2.mult(1) == X);
    CHECK(lt2.apply(pi2) == X * pi2 + X9);
}

TEST_CASE("Coates-Wiles homomorphism") {
    const PadicCtx* c = padic_ctx(5, 8);
    const size_t M = 12;
    PadicSeries w = PadicSeries::variable(c, M);
    PadicSeries flat = one_series(c, M);
    PadicElem beta = PadicElem::from_int(c, 7, 2);
    PadicSeries g = PadicSeries::constant(beta, M) - w;
    mpz_class fact = 1;
    for (unsigned k = 1; k <= 8; ++k) {
        if (k > 1) fact *= (k - 1);
        CHECK(coates_wiles_delta(flat, PadicSeries::constant(beta, M), k).is_zero());
        CHECK(coates_wiles_delta(flat, g, k) == -(PadicElem(c, fact) * beta.pow(-static_cast<long>(k))));
    }
    CHECK_THROWS_AS(coates_wiles_delta(flat, g, 11), Error);
    CHECK_THROWS_AS(coates_wiles_delta(flat, w, 1), Error);

    // Lubin-Tate p = 3, pi = 3, k = 2: -1/beta^2.
    const PadicCtx* c3 = padic_ctx(3, 10);
    FormalGroupData lt = lubin_tate(PadicElem::from_int(c3, 3), 3, 10, 20);
    PadicElem b3 = PadicElem::from_int(c3, 4, 1);
    PadicSeries g3 = PadicSeries::constant(b3, 20) - PadicSeries::variable(c3, 20);
    CHECK(coates_wiles_delta(lt, g3, 2) == -(b3.pow(-2)));

    // Homomorphism and mu-equivariance.
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<long> dist(0, 1000000);
    auto rnd = [&] {
        PadicSeries s(c3, 20);
        for (size_t i = 0; i < 20; ++i) s[i] = PadicElem::from_int(c3, dist(rng), dist(rng));
        if (!s[0].is_unit()) s[0] = s[0] + PadicElem::from_int(c3, 1);
        if (!s[0].is_unit()) s[0] = s[0] + PadicElem::from_int(c3, 1);
        return s;
    };
    PadicElem zeta = teichmuller(PadicElem::from_int(c3, 1, 1));
    for (int i = 0; i < 10; ++i) {
        PadicSeries a = rnd(), b = rnd();
        for (unsigned k = 1; k <= 6; ++k) {
            CHECK(coates_wiles_delta(lt, a * b, k) == coates_wiles_delta(lt, a, k) + coates_wiles_delta(lt, b, k));
            PadicSeries az = a.compose(PadicSeries::variable(c3, 20) * zeta);
            CHECK(coates_wiles_delta(lt, az, k) == zeta.pow(k) * coates_wiles_delta(lt, a, k));
        }
    }
}

TEST_CASE("Lubin-Tate image report") {
    LubinTateImageReport r = verify_lubin_tate_image(3, PadicElem::from_int(padic_ctx(3, 10), 3), 7, 10, 12);
    CHECK(r.beta_ok);
    CHECK(r.log_prime_flat);
    CHECK(r.mu_action_ok);
    REQUIRE(r.entries.size() == 7);
    CHECK(r.entries[0].valuation == 0);
    CHECK(r.entries[0].delta == -(r.beta.inv()));
    CHECK(r.entries[6].valuation == 2);
    for (const auto& e : r.entries) {
        CHECK(e.ok);
        CHECK(e.matches_flat);
    }
    CHECK(r.all_ok);

    LubinTateImageReport r5 = verify_lubin_tate_image(5, PadicElem::from_int(padic_ctx(5, 8), 5), 23, 8, 27);
    CHECK(r5.entries.size() == 23);
    CHECK(r5.all_ok);
    CHECK(r5.entries[22].expected == 4);
    CHECK_THROWS_AS(verify_lubin_tate_image(3, PadicElem::from_int(padic_ctx(3, 10), 3), 8, 10, 12), Error);
}
