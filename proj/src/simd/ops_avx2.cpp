// AVX2+FMA variants of the dispatch-table kernels. This translation unit is
// the only one compiled with -mavx2 -mfma; callers reach it through
// active_ops() after a runtime CPU check.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "sfspline/simd/ops.hpp"

namespace sfs::simd {
namespace {

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

// k2(x) = 0.5 (x-1/2)^2 - 1/24
inline __m256d k2_pd(__m256d x) {
    const __m256d b = _mm256_sub_pd(x, _mm256_set1_pd(0.5));
    return _mm256_fmsub_pd(_mm256_mul_pd(b, b), _mm256_set1_pd(0.5),
                           _mm256_set1_pd(1.0 / 24.0));
}

// k4(h) = ((h-1/2)^4 - (h-1/2)^2/2 + 7/240) / 24
inline __m256d k4_pd(__m256d h) {
    const __m256d b = _mm256_sub_pd(h, _mm256_set1_pd(0.5));
    const __m256d b2 = _mm256_mul_pd(b, b);
    const __m256d poly = _mm256_add_pd(
        _mm256_fmsub_pd(b2, b2, _mm256_mul_pd(b2, _mm256_set1_pd(0.5))),
        _mm256_set1_pd(7.0 / 240.0));
    return _mm256_mul_pd(poly, _mm256_set1_pd(1.0 / 24.0));
}

inline double k2_of(double x) {
    const double b = x - 0.5;
    return 0.5 * b * b - 1.0 / 24.0;
}

inline double k4_of(double h) {
    const double b = h - 0.5;
    const double b2 = b * b;
    return (b2 * b2 - 0.5 * b2 + 7.0 / 240.0) / 24.0;
}

void cubic_rk_col_avx2(const double* x, std::size_t n, double t, double* out) {
    const double k2t = k2_of(t);
    const __m256d k2tv = _mm256_set1_pd(k2t);
    const __m256d tv = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d h = abs_pd(_mm256_sub_pd(xv, tv));
        const __m256d val = _mm256_fmsub_pd(k2_pd(xv), k2tv, k4_pd(h));
        _mm256_storeu_pd(out + i, val);
    }
    for (; i < n; ++i)
        out[i] = k2_of(x[i]) * k2t - k4_of(std::fabs(x[i] - t));
}

void linear_rk_col_avx2(const double* x, std::size_t n, double t, double* out) {
    const double k1t = t - 0.5;
    const __m256d k1tv = _mm256_set1_pd(k1t);
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(xv, half), k1tv));
    }
    for (; i < n; ++i) out[i] = (x[i] - 0.5) * k1t;
}

void ssanova_rk_col_avx2(const double* const* cols, std::size_t d,
                         std::size_t n, const double* t, double* out) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d skc = _mm256_setzero_pd();
        __m256d su = _mm256_setzero_pd();
        __m256d suu = _mm256_setzero_pd();
        __m256d sv = _mm256_setzero_pd();
        __m256d svv = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            const __m256d xv = _mm256_loadu_pd(cols[j] + i);
            const __m256d tv = _mm256_set1_pd(t[j]);
            const __m256d h = abs_pd(_mm256_sub_pd(xv, tv));
            const __m256d kc =
                _mm256_fmsub_pd(k2_pd(xv), _mm256_set1_pd(k2_of(t[j])), k4_pd(h));
            const __m256d kl = _mm256_mul_pd(_mm256_sub_pd(xv, half),
                                             _mm256_set1_pd(t[j] - 0.5));
            const __m256d u = _mm256_add_pd(kc, kl);
            skc = _mm256_add_pd(skc, kc);
            su = _mm256_add_pd(su, u);
            suu = _mm256_fmadd_pd(u, u, suu);
            sv = _mm256_add_pd(sv, kl);
            svv = _mm256_fmadd_pd(kl, kl, svv);
        }
        const __m256d pair_u = _mm256_fmsub_pd(su, su, suu);
        const __m256d pair_v = _mm256_fmsub_pd(sv, sv, svv);
        const __m256d val = _mm256_fmadd_pd(
            _mm256_sub_pd(pair_u, pair_v), half, skc);
        _mm256_storeu_pd(out + i, val);
    }
    for (; i < n; ++i) {
        double skc = 0.0, su = 0.0, suu = 0.0, sv = 0.0, svv = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = cols[j][i];
            const double tj = t[j];
            const double kc = k2_of(xj) * k2_of(tj) - k4_of(std::fabs(xj - tj));
            const double kl = (xj - 0.5) * (tj - 0.5);
            const double u = kc + kl;
            skc += kc;
            su += u;
            suu += u * u;
            sv += kl;
            svv += kl * kl;
        }
        out[i] = skc + 0.5 * ((su * su - suu) - (sv * sv - svv));
    }
}

void count_open_closed_avx2(const double* const* cols, std::size_t d,
                            std::size_t n, const double* corner,
                            std::size_t* open, std::size_t* closed) {
    std::size_t op = 0, cl = 0;
    std::size_t i = 0;
    const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (; i + 4 <= n; i += 4) {
        __m256d mo = all, mc = all;
        for (std::size_t j = 0; j < d; ++j) {
            const __m256d v = _mm256_loadu_pd(cols[j] + i);
            const __m256d a = _mm256_set1_pd(corner[j]);
            mo = _mm256_and_pd(mo, _mm256_cmp_pd(v, a, _CMP_LT_OQ));
            mc = _mm256_and_pd(mc, _mm256_cmp_pd(v, a, _CMP_LE_OQ));
        }
        op += std::popcount(static_cast<unsigned>(_mm256_movemask_pd(mo)));
        cl += std::popcount(static_cast<unsigned>(_mm256_movemask_pd(mc)));
    }
    for (; i < n; ++i) {
        bool in_open = true, in_closed = true;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = cols[j][i];
            in_open = in_open && (v < corner[j]);
            in_closed = in_closed && (v <= corner[j]);
        }
        op += in_open;
        cl += in_closed;
    }
    *open = op;
    *closed = cl;
}

void sq_dist_col_avx2(const double* const* cols, std::size_t d, std::size_t n,
                      const double* query, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < d; ++j) {
            const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(cols[j] + i),
                                               _mm256_set1_pd(query[j]));
            acc = _mm256_fmadd_pd(diff, diff, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = cols[j][i] - query[j];
            acc += diff * diff;
        }
        out[i] = acc;
    }
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops = {
        cubic_rk_col_avx2,  linear_rk_col_avx2,
        ssanova_rk_col_avx2,
        // ln() has no AVX2 primitive worth hand-rolling; the thin-plate
        // column stays on the reference path.
        scalar_ops().tps_rk_col,
        count_open_closed_avx2, sq_dist_col_avx2, "avx2",
    };
    return ops;
}

}  // namespace sfs::simd

#endif  // x86_64
