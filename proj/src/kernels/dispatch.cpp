#include <cstdlib>
#include <cstring>

#include "isac/kernels.hpp"

namespace isac::kernels {

#ifdef ISAC_HAVE_AVX2
const KernelTable* avx2_table();  // kernels_avx2.cpp
#endif

const KernelTable* avx2_kernels() {
#if defined(ISAC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable* chosen = [] {
        const char* force = std::getenv("ISAC_FORCE_SCALAR");
        bool forced = force != nullptr && *force != '\0' && std::strcmp(force, "0") != 0;
        const KernelTable* simd = forced ? nullptr : avx2_kernels();
        return simd ? simd : &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace isac::kernels
