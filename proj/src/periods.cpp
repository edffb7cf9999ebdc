#include "cmlab/periods.hpp"

#include <algorithm>

namespace cmlab {

namespace {

Real tol(int digits) { return ten_pow(-digits); }

}  // namespace

std::array<Real, 2> PeriodLattice::coords(const BigComplex& u) const {
    BigComplex r = u / omega;
    Real s3 = sqrt(Real(-d));
    Real t = 2 * r.im / s3;
    Real s = r.re - t * Real(d) / 2;
    return {s, t};
}

BigComplex PeriodLattice::reduce(const BigComplex& u) const {
    auto [s, t] = coords(u);
    s -= floor(s);
    t -= floor(t);
    Real s3 = sqrt(Real(-d));
    BigComplex wK(Real(d) / 2, s3 / 2);
    return omega * (BigComplex(s) + wK * t);
}

std::array<BigComplex, 3> cubic_roots(const Real& A, const Real& B) {
    // Durand-Kerner iteration, started on a circle of radius about the root bound.
    const int D = working_digits();
    Real R = 1 + rmax(sqrt(abs(A)), cbrt(abs(B)));
    BigComplex seed(Real("0.4"), Real("0.9"));
    std::array<BigComplex, 3> z = {seed * R, seed * seed * R, seed * seed * seed * R};
    auto f = [&](const BigComplex& x) { return x * x * x + x * A + BigComplex(B); };
    Real eps = tol(D - 5) * R;
    for (int it = 0; it < 500; ++it) {
        Real change = 0;
        for (int i = 0; i < 3; ++i) {
            BigComplex den(1);
            for (int j = 0; j < 3; ++j)
                if (j != i) den *= (z[i] - z[j]);
            BigComplex delta = f(z[i]) / den;
            z[i] -= delta;
            change = rmax(change, delta.abs());
        }
        if (change < eps) return z;
    }
    throw Error(Errc::PrecisionLoss, "cubic root iteration did not converge");
}

BigComplex agm(BigComplex a, BigComplex b) {
    const int D = working_digits();
    if ((a - b).abs() > (a + b).abs()) b = -b;
    for (int it = 0; it < 400; ++it) {
        BigComplex a1 = (a + b) / Real(2);
        BigComplex b1 = csqrt(a * b);
        if ((a1 - b1).abs() > (a1 + b1).abs()) b1 = -b1;
        a = a1;
        b = b1;
        if ((a - b).abs() <= tol(D - 2) * a.abs()) return a;
    }
    throw Error(Errc::PrecisionLoss, "AGM did not converge");
}

std::pair<BigComplex, BigComplex> lattice_invariants(const BigComplex& w1, const BigComplex& tau) {
    const int D = working_digits();
    Real pi = real_pi();
    BigComplex q = cexp(BigComplex(Real(0), 2 * pi) * tau);
    BigComplex s4(0), s6(0), qn(1);
    Real qa = q.abs();
    for (long n = 1; n < 100000; ++n) {
        qn *= q;
        BigComplex t = qn / (BigComplex(1) - qn);
        Real n3 = Real(n) * n * n;
        s4 += t * n3;
        s6 += t * (n3 * n * n);
        if (qn.abs() * n3 * n * n < tol(D + 2)) break;
    }
    BigComplex E4 = BigComplex(1) + s4 * Real(240);
    BigComplex E6 = BigComplex(1) - s6 * Real(504);
    BigComplex c = BigComplex(2 * pi) / w1;
    BigComplex c2 = c * c;
    BigComplex c4 = c2 * c2;
    BigComplex g2 = c4 * E4 / Real(12);
    BigComplex g3 = c4 * c2 * E6 / Real(216);
    (void)qa;
    return {g2, g3};
}

PeriodLattice periods(const CMCurve& E, int digits) {
    if (digits < 30) throw Error(Errc::InvalidArgument, "periods need at least 30 digits");
    const int D = digits + 20;
    DigitsGuard guard(D);
    PeriodLattice L;
    L.d = E.d;
    L.digits = digits;
    Real A = from_mpq(E.A), B = from_mpq(E.B);
    L.g2 = -4 * A;
    L.g3 = -4 * B;
    auto e = cubic_roots(A, B);
    Real pi = real_pi();

    std::vector<BigComplex> cands;
    const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& pm : perm) {
        BigComplex a = csqrt(e[pm[0]] - e[pm[2]]);
        BigComplex b = csqrt(e[pm[0]] - e[pm[1]]);
        cands.push_back(BigComplex(pi) / agm(a, b));
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const BigComplex& x, const BigComplex& y) { return x.abs() < y.abs(); });
    BigComplex w1 = cands[0], w2;
    bool found = false;
    for (size_t i = 1; i < cands.size(); ++i) {
        if (abs((cands[i] / w1).im) > Real("1e-10")) {
            w2 = cands[i];
            found = true;
            break;
        }
    }
    if (!found) throw Error(Errc::LatticeMismatch, "period candidates are collinear");
    for (int it = 0; it < 200; ++it) {
        if (w2.abs() < w1.abs()) std::swap(w1, w2);
        Real m = round((w2 / w1).re);
        w2 -= w1 * m;
        if (w2.abs() >= w1.abs() * (1 - tol(D / 2))) break;
    }
    if ((w2 / w1).im < 0) w2 = -w2;
    BigComplex tau = w2 / w1;

    auto [g2, g3] = lattice_invariants(w1, tau);
    Real scale = rmax(abs(L.g2), abs(L.g3)) + 1;
    Real res = rmax((g2 - BigComplex(L.g2)).abs(), (g3 - BigComplex(L.g3)).abs()) / scale;
    L.basis_residual = log10_abs(res);
    if (res > tol(digits)) throw Error(Errc::PrecisionLoss, E.label + ": g2/g3 check failed at 10^" +
                                                                std::to_string(L.basis_residual));

    // Match the reduced basis against omega_K = (d + sqrt d)/2.
    Real s3 = sqrt(Real(-E.d));
    BigComplex wK(Real(E.d) / 2, s3 / 2);
    BigComplex omega;
    bool matched = false;
    for (int which = 0; which < 2 && !matched; ++which) {
        BigComplex c = which == 0 ? tau : BigComplex(-1) / tau;
        BigComplex base = which == 0 ? w1 : w2;
        BigComplex diff = c - wK;
        Real m = round(diff.re);
        if ((diff - BigComplex(m)).abs() < tol(digits / 2)) {
            omega = base;
            matched = true;
        }
    }
    if (!matched) throw Error(Errc::LatticeMismatch, E.label + ": tau does not reduce to omega_K");

    // Fix omega among its unit multiples: largest real part, then largest imaginary part.
    const auto& U = E.field().units();
    BigComplex best = omega;
    for (const auto& u : U) {
        BigComplex c = omega * u.to_complex();
        Real dr = c.re - best.re;
        if (dr > tol(digits / 2) || (abs(dr) <= tol(digits / 2) && c.im > best.im + tol(digits / 2))) best = c;
    }
    L.omega = best;
    L.w1 = w1;
    L.w2 = w2;
    L.tau = tau;

    // Least positive real lattice element: Im(omega*(a + b*w_K)) = 0 fixes a/b,
    // a rational number with small height that continued fractions recover.
    Real ia = L.omega.im;
    Real ib = (L.omega * wK).im;
    mpz_class za, zb;
    if (abs(ia) <= tol(digits / 2) * L.omega.abs()) {
        za = 1;
        zb = 0;
    } else {
        Real r = -ib / ia;
        mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
        Real x = r;
        bool done = false;
        for (int it = 0; it < 64 && !done; ++it) {
            mpz_class a = round_to_mpz(floor(x));
            mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
            Real err = abs(from_mpz(h1) / from_mpz(k1) - r);
            if (err < tol(digits / 2) * (1 + abs(r))) done = true;
            Real frac = x - floor(x);
            if (frac == 0) break;
            x = 1 / frac;
        }
        if (!done) throw Error(Errc::LatticeMismatch, E.label + ": no real lattice element found");
        za = h1;
        zb = k1;
    }
    QuadInt zx(E.d, za, zb);
    if ((L.omega * zx.to_complex()).re < 0) zx = -zx;
    L.z = zx;
    BigComplex v = L.omega * L.z.to_complex();
    L.omega_plus = v.re;
    L.z_residual = log10_abs(abs(v.im) / v.re);
    mpz_class nz = L.z.norm();
    L.z_prime_to_6sqrtd = gcd(nz, mpz_class(6 * -E.d)) == 1;
    return L;
}

}  // namespace cmlab
