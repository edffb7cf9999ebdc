#include "cmlab/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace cmlab::simd {

bool avx2_compiled() {
#ifdef CMLAB_BUILD_AVX2
    return true;
#else
    return false;
#endif
}

Isa active_isa() {
    static const Isa isa = [] {
        const char* env = std::getenv("CMLAB_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
#if defined(CMLAB_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
        if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
        return Isa::Scalar;
    }();
    return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void mul_trunc_mod(const uint32_t* a, const uint32_t* b, uint32_t* out, size_t n, uint32_t p) {
#ifdef CMLAB_BUILD_AVX2
    if (active_isa() == Isa::Avx2) return avx2::mul_trunc_mod(a, b, out, n, p);
#endif
    scalar::mul_trunc_mod(a, b, out, n, p);
}

int64_t gather_sum(const int32_t* table, const uint32_t* idx, size_t n) {
#ifdef CMLAB_BUILD_AVX2
    if (active_isa() == Isa::Avx2) return avx2::gather_sum(table, idx, n);
#endif
    return scalar::gather_sum(table, idx, n);
}

}  // namespace cmlab::simd
