#include "doctest.h"

#include "cmlab/curvedb.hpp"
#include "cmlab/periods.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

using namespace cmlab;

namespace {

const CurveDB& db() {
    static CurveDB d = CurveDB::load(CurveDB::default_path());
    return d;
}

// Least real period by quadrature: int_{e1}^inf dx / sqrt(x^3 + A x + B), e1 the largest real root.
Real omega_plus_quadrature(const CMCurve& E) {
    Real A = from_mpq(E.A), B = from_mpq(E.B);
    auto roots = cubic_roots(A, B);
    Real e1;
    bool have = false;
    for (auto& r : roots)
        if (abs(r.im) < Real("1e-40") * (1 + abs(r.re)) && (!have || r.re > e1)) {
            e1 = r.re;
            have = true;
        }
    REQUIRE(have);
    // x = e1 + u^2 turns the integrand into 2 / sqrt(x^2 + e1 x + e1^2 + A); the other
    // roots can sit close to the real axis, so split at u^2 = Re(e2) - e1.
    auto f = [&](const Real& u) {
        Real x = e1 + u * u;
        return Real(2) / sqrt(x * x + e1 * x + e1 * e1 + A);
    };
    Real split = 1;
    for (auto& r : roots)
        if (r.re - e1 > Real("1e-30")) split = sqrt(r.re - e1);
    boost::math::quadrature::tanh_sinh<Real> ts(12, Real("1e-300"));
    boost::math::quadrature::exp_sinh<Real> es;
    Real tolq("1e-45");
    return ts.integrate(f, Real(0), split, tolq) + ts.integrate(f, split, 2 * split, tolq) +
           es.integrate([&](const Real& v) { return f(v + 2 * split); }, tolq);
}

}  // namespace

TEST_CASE("E0 periods: square lattice and the lemniscatic period") {
    DigitsGuard g(70);
    const auto& E0 = db().get("E0");
    PeriodLattice L = periods(E0, 60);
    CHECK(abs(L.tau.re) < Real("1e-50"));
    CHECK(abs(L.tau.im - 1) < Real("1e-50"));
    // 2*Omega_+ is the dx/y period 2 int_1^inf dx/sqrt(x^3 - x) = 5.2441151086...
    Real twice = 2 * L.omega_plus;
    CHECK(abs(twice - Real("5.24411510858423962092967917978223882736550990286324")) < Real("1e-48"));
    // Independent tanh-sinh quadrature of 2 int_0^1 dt / sqrt(1 - t^4).
    boost::math::quadrature::tanh_sinh<Real> ts(12, Real("1e-300"));
    // The complement argument keeps 1 - t accurate near the endpoint.
    Real q = 2 * ts.integrate(
                     [](const Real& t, const Real& tc) {
                         Real one_minus = tc > 0 ? tc : Real(1 - t);
                         return 1 / sqrt(one_minus * (1 + t) * (1 + t * t));
                     },
                     Real(0), Real(1), Real("1e-50"));
    CHECK(abs(q - L.omega_plus) < Real("1e-45"));
    CHECK(L.z == QuadInt(-4, 1, 0));
    CHECK(L.z_prime_to_6sqrtd);
}

TEST_CASE("period lattices of all bundled curves") {
    DigitsGuard g(60);
    for (const auto& E : db().curves()) {
        PeriodLattice L = periods(E, 40);
        CAPTURE(E.label);
        CHECK(L.basis_residual < -40);
        CHECK(L.z_residual < -20);
        // The real period matches quadrature.
        Real q = omega_plus_quadrature(E);
        CHECK(abs(q - L.omega_plus) / q < Real("1e-35"));
        // omega and omega*w_K reproduce the invariants.
        Real s = sqrt(Real(-E.d));
        BigComplex wK(Real(E.d) / 2, s / 2);
        auto [g2, g3] = lattice_invariants(L.omega, wK);
        CHECK((g2 - BigComplex(L.g2)).abs() / (abs(L.g2) + 1) < Real("1e-38"));
        CHECK((g3 - BigComplex(L.g3)).abs() / (abs(L.g3) + 1) < Real("1e-38"));
    }
}

TEST_CASE("doubling the lattice doubles omega") {
    DigitsGuard g(60);
    for (const auto& label : {"E0", "E7", "E3"}) {
        const auto& E = db().get(label);
        // (u^4 A, u^6 B) has lattice L/u; u = 1/2 gives 2L.
        CMCurve E2 = E.rescaled(mpq_class(1, 2));
        PeriodLattice L = periods(E, 40), L2 = periods(E2, 40);
        CHECK(rel_diff(L2.omega, L.omega * Real(2)) < Real("1e-38"));
        CHECK(abs(L2.omega_plus - 2 * L.omega_plus) < Real("1e-38"));
    }
}

TEST_CASE("AGM and cubic roots") {
    DigitsGuard g(50);
    // agm(1, sqrt 2) = 1.19814023473559220744...
    BigComplex m = agm(BigComplex(1), BigComplex(sqrt(Real(2))));
    CHECK(abs(m.re - Real("1.198140234735592207439922492280323878227212663215")) < Real("1e-45"));
    auto r = cubic_roots(Real(-1), Real(0));
    for (auto& x : r) CHECK((x * x * x - x).abs() < Real("1e-45"));
    CHECK_THROWS_AS(periods(db().get("E0"), 20), Error);
}

TEST_CASE("lattice reduction helpers") {
    DigitsGuard g(60);
    PeriodLattice L = periods(db().get("E7"), 40);
    BigComplex u = L.omega * BigComplex(Real("0.3"), Real("0.2"));
    BigComplex shifted = u + L.point(QuadInt(-7, 5, -3));
    CHECK((L.reduce(u) - L.reduce(shifted)).abs() < Real("1e-40"));
    auto c = L.coords(L.point(QuadInt(-7, 2, 3)));
    CHECK(abs(c[0] - 2) < Real("1e-40"));
    CHECK(abs(c[1] - 3) < Real("1e-40"));
}
