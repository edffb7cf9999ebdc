#include "cmlab/simd.hpp"

#include <immintrin.h>

#include <vector>

namespace cmlab::simd::avx2 {

void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p) {
    const uint64_t sq = static_cast<uint64_t>(p - 1) * (p - 1);
    // After a flush each slot holds < p, so k more rows fit while (p-1) + k*sq < 2^32.
    const size_t flush = sq == 0 ? n + 1 : static_cast<size_t>((0xFFFFFFFFull - (p - 1)) / sq);
    std::vector<uint32_t> acc(n, 0);
    size_t rows = 0;
    for (size_t i = 0; i < n; ++i) {
        const uint32_t ai = a[i];
        if (ai == 0) continue;
        const __m256i va = _mm256_set1_epi32(static_cast<int>(ai));
        const size_t len = n - i;
        uint32_t* dst = acc.data() + i;
        size_t j = 0;
        for (; j + 8 <= len; j += 8) {
            __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j));
            __m256i vd = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + j));
            vd = _mm256_add_epi32(vd, _mm256_mullo_epi32(va, vb));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + j), vd);
        }
        for (; j < len; ++j) dst[j] += ai * b[j];
        if (++rows == flush) {
            for (auto& v : acc) v %= p;
            rows = 0;
        }
    }
    for (size_t k = 0; k < n; ++k) out[k] = acc[k] % p;
}

int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n) {
    __m256i lo = _mm256_setzero_si256();
    __m256i hi = _mm256_setzero_si256();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + i));
        __m256i g = _mm256_i32gather_epi32(table, vi, 4);
        lo = _mm256_add_epi64(lo, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(g)));
        hi = _mm256_add_epi64(hi, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(g, 1)));
    }
    alignas(32) int64_t buf[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(buf), _mm256_add_epi64(lo, hi));
    int64_t s = buf[0] + buf[1] + buf[2] + buf[3];
    for (; i < n; ++i) s += table[idx[i]];
    return s;
}

}  // namespace cmlab::simd::avx2
