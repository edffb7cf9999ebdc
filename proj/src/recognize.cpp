#include "cmlab/recognize.hpp"

namespace cmlab {

BigComplex AlgebraicInK::to_complex() const {
    Real s = sqrt(Real(-d));
    return BigComplex(from_mpq(a), from_mpq(b) * s);
}

std::string AlgebraicInK::str() const {
    if (b == 0) return a.get_str();
    std::string r = a == 0 ? "" : a.get_str() + (b > 0 ? " + " : " - ");
    mpq_class ab = a == 0 ? b : mpq_class(abs(b));
    return r + ab.get_str() + "*sqrt(" + std::to_string(d) + ")";
}

std::optional<mpq_class> recognize_rational(const Real& x, const mpz_class& bound, const Real& tol) {
    mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    Real y = x;
    std::optional<mpq_class> best;
    for (int it = 0; it < 200; ++it) {
        Real fl = floor(y);
        mpz_class a = round_to_mpz(fl);
        mpz_class h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (abs(k2) > bound) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        mpq_class q(h1, k1);
        q.canonicalize();
        if (abs(from_mpq(q) - x) <= tol) {
            best = q;
            break;
        }
        Real frac = y - fl;
        if (frac == 0) break;
        y = 1 / frac;
    }
    return best;
}

AlgebraicInK recognize_in_K(const BigComplex& z, int d, int digits, const mpz_class& bound) {
    AlgebraicInK r;
    r.d = d;
    r.denominator_bound = bound;
    Real scale = rmax(Real(1), z.abs());
    Real tol = ten_pow(-(digits / 2)) * scale;
    Real s = sqrt(Real(-d));
    Real xa = z.re, xb = z.im / s;
    auto qa = recognize_rational(xa, bound, tol);
    auto qb = recognize_rational(xb, bound, tol / s);
    if (qa && qb) {
        r.a = *qa;
        r.b = *qb;
    } else {
        // Common-denominator sweep: the denominators of the convergents that did
        // appear, and their lcm, tried jointly on both coordinates.
        r.a = qa ? *qa : mpq_class(round_to_mpz(xa));
        r.b = qb ? *qb : mpq_class(round_to_mpz(xb));
        mpz_class q = 1;
        for (long m = 1; m <= 100000 && mpz_class(m) <= bound; ++m) {
            Real ma = xa * m, mb = xb * m;
            if (abs(ma - round(ma)) * 1 <= tol * m && abs(mb - round(mb)) * s <= tol * m) {
                q = m;
                r.a = mpq_class(round_to_mpz(ma), mpz_class(m));
                r.b = mpq_class(round_to_mpz(mb), mpz_class(m));
                r.a.canonicalize();
                r.b.canonicalize();
                break;
            }
        }
        (void)q;
    }
    r.residual = (z - r.to_complex()).abs();
    r.recognized = r.residual <= tol;
    return r;
}

}  // namespace cmlab
