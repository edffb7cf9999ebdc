#include "cmlab/fpseries.hpp"

#include "cmlab/error.hpp"
#include "cmlab/simd.hpp"

#include <algorithm>

namespace cmlab {

uint32_t FpLaurent::at(long n) const {
    long i = n - val;
    if (i < 0 || i >= static_cast<long>(c.size())) return 0;
    return c[static_cast<size_t>(i)];
}

std::vector<uint32_t> fp_mul(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b, size_t n, uint32_t p) {
    std::vector<uint32_t> A(n, 0), B(n, 0), out(n, 0);
    std::copy_n(a.begin(), std::min(n, a.size()), A.begin());
    std::copy_n(b.begin(), std::min(n, b.size()), B.begin());
    if (n) simd::mul_trunc_mod(A.data(), B.data(), out.data(), n, p);
    return out;
}

namespace {

uint32_t inv_mod(uint32_t a, uint32_t p) {
    uint64_t r = 1, b = a % p;
    for (uint32_t e = p - 2; e; e >>= 1) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
    }
    return static_cast<uint32_t>(r);
}

}  // namespace

std::vector<uint32_t> fp_inv(const std::vector<uint32_t>& a, size_t n, uint32_t p) {
    if (a.empty() || a[0] % p == 0) throw Error(Errc::NonUnit, "F_p series inverse needs a[0] != 0");
    std::vector<uint32_t> x = {inv_mod(a[0], p)};
    // x <- x (2 - a x), doubling the precision.
    for (size_t m = 1; m < n;) {
        m = std::min(2 * m, n);
        std::vector<uint32_t> ax = fp_mul(a, x, m, p);
        for (auto& v : ax) v = v ? p - v : 0;
        ax[0] = (ax[0] + 2) % p;
        x = fp_mul(x, ax, m, p);
    }
    x.resize(n);
    return x;
}

FpLaurent fp_make(uint32_t p, long val, std::vector<uint32_t> c) {
    size_t lead = 0;
    while (lead < c.size() && c[lead] % p == 0) ++lead;
    FpLaurent r;
    r.p = p;
    r.val = val + static_cast<long>(lead);
    r.c.assign(c.begin() + static_cast<long>(lead), c.end());
    for (auto& x : r.c) x %= p;
    return r;
}

FpLaurent operator+(const FpLaurent& a, const FpLaurent& b) {
    long prec = std::min(a.abs_prec(), b.abs_prec());
    long v = std::min(a.val, b.val);
    if (prec <= v) return fp_make(a.p, prec, {});
    std::vector<uint32_t> c(static_cast<size_t>(prec - v));
    for (long n = v; n < prec; ++n) c[static_cast<size_t>(n - v)] = (a.at(n) + b.at(n)) % a.p;
    return fp_make(a.p, v, std::move(c));
}

FpLaurent operator-(const FpLaurent& a) {
    FpLaurent r = a;
    for (auto& x : r.c) x = x ? a.p - x : 0;
    return r;
}

FpLaurent operator-(const FpLaurent& a, const FpLaurent& b) { return a + (-b); }

FpLaurent operator*(const FpLaurent& a, const FpLaurent& b) {
    size_t n = std::min(a.c.size(), b.c.size());
    if (n == 0) return fp_make(a.p, a.val + b.val, {});
    return fp_make(a.p, a.val + b.val, fp_mul(a.c, b.c, n, a.p));
}

FpLaurent operator*(const FpLaurent& a, uint32_t s) {
    FpLaurent r = a;
    for (auto& x : r.c) x = static_cast<uint32_t>(static_cast<uint64_t>(x) * s % a.p);
    return fp_make(a.p, r.val, std::move(r.c));
}

FpLaurent operator/(const FpLaurent& a, const FpLaurent& b) {
    if (b.known_zero()) throw Error(Errc::PrecisionLoss, "division by a series that is zero to its precision");
    size_t n = std::min(a.c.size(), b.c.size());
    if (a.known_zero()) return fp_make(a.p, a.val - b.val, {});
    return fp_make(a.p, a.val - b.val, fp_mul(a.c, fp_inv(b.c, n, b.p), n, a.p));
}

}  // namespace cmlab
