#include <cstdlib>
#include <cstring>

#include "sfspline/simd/ops.hpp"

namespace sfs::simd {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();  // defined in ops_avx2.cpp

static bool cpu_has_avx2_fma() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

static const Ops& pick() {
    const char* force = std::getenv("SFSPLINE_SIMD");
    if (force && std::strcmp(force, "scalar") == 0) return scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
    if (force && std::strcmp(force, "avx2") == 0)
        return cpu_has_avx2_fma() ? avx2_ops() : scalar_ops();
    if (cpu_has_avx2_fma()) return avx2_ops();
#endif
    return scalar_ops();
}

const Ops& active_ops() {
    static const Ops& ops = pick();
    return ops;
}

}  // namespace sfs::simd
