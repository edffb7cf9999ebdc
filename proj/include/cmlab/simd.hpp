#pragma once

#include <cstddef>
#include <cstdint>

namespace cmlab::simd {

enum class Isa { Scalar, Avx2 };

// Best available ISA; CMLAB_SIMD=scalar in the environment forces the reference path.
Isa active_isa();
const char* isa_name(Isa isa);
bool avx2_compiled();

// out[k] = sum_{i+j=k} a[i]*b[j] mod p for k < n. Inputs reduced mod p, p < 2^16.
void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p);
// sum_i table[idx[i]].
int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n);

namespace scalar {
void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p);
int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n);
}  // namespace scalar

namespace avx2 {
void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p);
int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n);
}  // namespace avx2

}  // namespace cmlab::simd
