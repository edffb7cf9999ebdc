#pragma once

#include <cstdint>
#include <vector>

namespace cmlab {

// Laurent series over F_p with explicit precision: value t^val * sum c[i] t^i,
// known modulo t^(val + c.size()). c[0] != 0 unless c is empty, in which case
// the series is zero to precision t^val.
struct FpLaurent {
    uint32_t p = 0;
    long val = 0;
    std::vector<uint32_t> c;

    long abs_prec() const { return val + static_cast<long>(c.size()); }
    bool known_zero() const { return c.empty(); }
    // Coefficient of t^n (0 outside the known range).
    uint32_t at(long n) const;
};

// Truncated product mod (p, t^n) through the SIMD dispatcher.
std::vector<uint32_t> fp_mul(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b, size_t n, uint32_t p);
// 1/a mod t^n, a[0] != 0 (Newton iteration).
std::vector<uint32_t> fp_inv(const std::vector<uint32_t>& a, size_t n, uint32_t p);

FpLaurent fp_make(uint32_t p, long val, std::vector<uint32_t> c);
FpLaurent operator+(const FpLaurent& a, const FpLaurent& b);
FpLaurent operator-(const FpLaurent& a);
FpLaurent operator-(const FpLaurent& a, const FpLaurent& b);
FpLaurent operator*(const FpLaurent& a, const FpLaurent& b);
FpLaurent operator*(const FpLaurent& a, uint32_t s);
// Throws PrecisionLoss when a is zero to its precision.
FpLaurent operator/(const FpLaurent& a, const FpLaurent& b);

}  // namespace cmlab
