#include "cmlab/gammafn.hpp"

#include "cmlab/error.hpp"

#include <boost/math/constants/constants.hpp>

#include <mutex>
#include <vector>

namespace cmlab {

const std::vector<mpq_class>& bernoulli_even(size_t count) {
    static std::mutex mu;
    static std::vector<mpq_class> all_b;  // B_0..B_n
    static std::vector<mpq_class> even;
    std::lock_guard<std::mutex> lock(mu);
    size_t need = 2 * count;
    if (all_b.empty()) all_b.push_back(1);
    while (all_b.size() <= need) {
        size_t n = all_b.size();
        // B_n = -1/(n+1) sum_{k<n} C(n+1, k) B_k
        mpq_class s = 0;
        mpz_class c = 1;
        for (size_t k = 0; k < n; ++k) {
            s += c * all_b[k];
            c = c * (n + 1 - k) / (k + 1);
        }
        all_b.push_back(-s / mpq_class(mpz_class(n + 1)));
    }
    while (even.size() < count) even.push_back(all_b[2 * even.size()]);
    return even;
}

namespace {

bool nonpositive_integer(const BigComplex& s) {
    if (s.im != 0 || s.re > 0) return false;
    return s.re == floor(s.re);
}

BigComplex csin(const BigComplex& z) {
    // sin z = (e^{iz} - e^{-iz}) / 2i
    BigComplex iz(-z.im, z.re);
    BigComplex a = cexp(iz), b = cexp(-iz);
    BigComplex d = a - b;
    return BigComplex(d.im / 2, -d.re / 2);
}

// log Gamma(z) by Stirling's series, Re z >= 1/2.
BigComplex stirling_gamma(BigComplex z) {
    const int D = working_digits();
    const double need = 0.4 * D + 8;
    BigComplex prod(1);
    while (z.abs() < need) {
        prod *= z;
        z += BigComplex(1);
    }
    Real pi = real_pi();
    BigComplex lz = clog(z);
    BigComplex lg = (z - BigComplex(Real("0.5"))) * lz - z + BigComplex(log(2 * pi) / 2);
    BigComplex zinv = BigComplex(1) / z, z2 = zinv * zinv, zp = zinv;
    Real eps = ten_pow(-D - 3);
    for (size_t m = 1;; ++m) {
        const auto& B = bernoulli_even(m + 1);
        BigComplex term = zp * (from_mpq(B[m]) / Real(2 * m * (2 * m - 1)));
        lg += term;
        if (term.abs() < eps) break;
        if (m > 4 * static_cast<size_t>(D) + 50)
            throw Error(Errc::PrecisionLoss, "Stirling series did not converge");
        zp *= z2;
    }
    return cexp(lg) / prod;
}

}  // namespace

BigComplex cgamma(const BigComplex& s) {
    if (nonpositive_integer(s)) throw Error(Errc::PoleAtS, "Gamma pole at " + to_string(s.re, 10));
    if (s.re < Real("0.5")) {
        // Reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s).
        Real pi = real_pi();
        return BigComplex(pi) / (csin(s * pi) * stirling_gamma(BigComplex(1) - s));
    }
    return stirling_gamma(s);
}

BigComplex upper_gamma(const BigComplex& s, const Real& x) {
    if (x <= 0) throw Error(Errc::InvalidArgument, "upper_gamma needs x > 0");
    const int D = working_digits();
    Real eps = ten_pow(-D - 2);
    BigComplex pref = cexp(s * log(x) - BigComplex(x));  // x^s e^{-x}
    if (x <= 3 && nonpositive_integer(s)) {
        // Gamma(0, x) = E1(x) = -gamma - log x - sum (-x)^n / (n n!), then
        // Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s downward.
        Real term = 1, sum = 0;
        for (long n = 1;; ++n) {
            term *= -x / Real(n);
            Real t = term / Real(n);
            sum += t;
            if (abs(t) < eps) break;
            if (n > 100000) throw Error(Errc::PrecisionLoss, "exponential integral series");
        }
        Real g = -boost::math::constants::euler<Real>() - log(x) - sum;
        long m = -s.re.convert_to<long>();
        for (long j = 1; j <= m; ++j) {
            Real sj = Real(-j);
            g = (g - exp(sj * log(x) - x)) / sj;
        }
        return BigComplex(g);
    }
    if (x <= 3) {
        // Gamma(s) - gamma(s, x) with gamma(s, x) = x^s e^{-x} sum x^n / (s)_{n+1}.
        BigComplex term = BigComplex(1) / s, sum = term;
        for (long n = 1;; ++n) {
            term = term * x / (s + BigComplex(n));
            sum += term;
            if (term.abs() < eps * sum.abs()) break;
            if (n > 100000) throw Error(Errc::PrecisionLoss, "incomplete gamma series");
        }
        return cgamma(s) - pref * sum;
    }
    // Modified Lentz on x + 1 - s - 1(1-s)/(x + 3 - s - 2(2-s)/(...)).
    Real tiny = ten_pow(-4 * D);
    BigComplex b = BigComplex(x + 1) - s;
    BigComplex f = b;
    if (f.abs() < tiny) f = BigComplex(tiny);
    BigComplex C = f, Dn(0);
    for (long n = 1;; ++n) {
        BigComplex a = -(BigComplex(n) - s) * Real(n);
        b += BigComplex(2);
        Dn = b + a * Dn;
        if (Dn.abs() < tiny) Dn = BigComplex(tiny);
        C = b + a / C;
        if (C.abs() < tiny) C = BigComplex(tiny);
        Dn = BigComplex(1) / Dn;
        BigComplex delta = C * Dn;
        f *= delta;
        if ((delta - BigComplex(1)).abs() < eps) break;
        if (n > 200000) throw Error(Errc::PrecisionLoss, "incomplete gamma continued fraction");
    }
    return pref / f;
}

}  // namespace cmlab
