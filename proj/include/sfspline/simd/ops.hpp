#pragma once

#include <cstddef>

namespace sfs::simd {

// Hot inner loops of the library, exposed as a dispatch table. Every entry
// has a scalar reference implementation; on x86 with AVX2+FMA an accelerated
// variant is selected at startup. Variants must agree with the reference to
// 1e-12 elementwise (exactly, for the integer counts).
//
// Point sets are passed SoA: cols[j] points at n contiguous values of
// coordinate j (an Eigen column-major matrix column qualifies directly).
struct Ops {
    // out[i] = k2(x[i]) k2(t) - k4(|x[i] - t|), the cubic-spline reproducing
    // kernel column against a fixed point t.
    void (*cubic_rk_col)(const double* x, std::size_t n, double t, double* out);

    // out[i] = (x[i] - 1/2)(t - 1/2), the parametric linear kernel column.
    void (*linear_rk_col)(const double* x, std::size_t n, double t, double* out);

    // Tensor-product kernel column with all main effects and two-way
    // interactions: for each row i,
    //   out[i] = sum_j Kc_j + sum_{j<k} (Kl_j Kc_k + Kc_j Kl_k + Kc_j Kc_k)
    // where Kc_j = Kc(cols[j][i], t[j]) and Kl_j = k1(cols[j][i]) k1(t[j]).
    void (*ssanova_rk_col)(const double* const* cols, std::size_t d,
                           std::size_t n, const double* t, double* out);

    // Thin-plate semi-kernel column, d=2: r^2 ln(r) / (8 pi), 0 at r=0.
    void (*tps_rk_col)(const double* x0, const double* x1, std::size_t n,
                       double t0, double t1, double* out);

    // Counts points inside the anchored box [0, corner): open counts with
    // x_j < corner_j in every coordinate, closed with x_j <= corner_j.
    void (*count_open_closed)(const double* const* cols, std::size_t d,
                              std::size_t n, const double* corner,
                              std::size_t* open, std::size_t* closed);

    // out[i] = squared Euclidean distance from point i to query.
    void (*sq_dist_col)(const double* const* cols, std::size_t d, std::size_t n,
                        const double* query, double* out);

    const char* name;
};

/// Portable reference implementations.
const Ops& scalar_ops();

/// Best implementation for this machine, chosen once at first use.
/// The SFSPLINE_SIMD environment variable ("scalar" or "avx2") overrides
/// detection; requesting an unsupported ISA falls back to scalar.
const Ops& active_ops();

}  // namespace sfs::simd
