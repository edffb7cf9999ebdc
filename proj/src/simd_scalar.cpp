#include "cmlab/simd.hpp"

#include <vector>

namespace cmlab::simd::scalar {

void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p) {
    // 32-bit accumulators, flushed before (p-1)^2 * rows can overflow.
    const uint64_t sq = static_cast<uint64_t>(p - 1) * (p - 1);
    // After a flush each slot holds < p, so k more rows fit while (p-1) + k*sq < 2^32.
    const size_t flush = sq == 0 ? n + 1 : static_cast<size_t>((0xFFFFFFFFull - (p - 1)) / sq);
    std::vector<uint32_t> acc(n, 0);
    size_t rows = 0;
    for (size_t i = 0; i < n; ++i) {
        const uint32_t ai = a[i];
        if (ai == 0) continue;
        for (size_t j = 0; i + j < n; ++j) acc[i + j] += ai * b[j];
        if (++rows == flush) {
            for (auto& v : acc) v %= p;
            rows = 0;
        }
    }
    for (size_t k = 0; k < n; ++k) out[k] = acc[k] % p;
}

int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n) {
    int64_t s = 0;
    for (size_t i = 0; i < n; ++i) s += table[idx[i]];
    return s;
}

}  // namespace cmlab::simd::scalar
