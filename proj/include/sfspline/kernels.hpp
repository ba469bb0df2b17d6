#pragma once

#include <string>

#include "sfspline/types.hpp"

namespace sfs {

enum class KernelFamily { cubic_1d, ssanova_2way, thinplate_2d };

std::string to_string(KernelFamily f);

/// Spline family plus the derived null-space dimension m.
///   cubic-1d      univariate cubic smoothing spline, m = 2
///   ssanova-2way  tensor-product cubic spline with all main effects and
///                 two-way interactions under one smoothing parameter,
///                 m = 1 + d + d(d-1)/2
///   thinplate-2d  thin-plate semi-kernel, d = 2 only, m = 3; its Gram is
///                 positive only under the side condition handled in the
///                 solver
struct KernelSpec {
    KernelFamily family;
    Index d;
    Index null_dim;
};

KernelSpec make_kernel_spec(KernelFamily family, Index d);

/// CLI names: cubic | ssanova | tps.
KernelSpec kernel_spec_from_string(const std::string& name, Index d);

/// Scaled Bernoulli polynomials driving the cubic-spline reproducing kernel:
/// k1(x) = x - 1/2, k2 = (k1^2 - 1/12)/2, k4 = (k1^4 - k1^2/2 + 7/240)/24.
/// Each integrates to zero over [0,1].
double bern_k1(double x);
double bern_k2(double x);
double bern_k4(double x);

/// Cubic-spline reproducing kernel on [0,1]: k2(s)k2(t) - k4(|s-t|).
double cubic_rk(double s, double t);

/// Null-space basis at one point (length null_dim):
///   cubic-1d      (1, k1(x))
///   ssanova-2way  (1, k1(x_j) for each j, then k1(x_j)k1(x_k) for j<k in
///                 lexicographic order)
///   thinplate-2d  (1, x_1, x_2)
Vector null_basis_eval(const KernelSpec& spec, const Vector& x);

/// Rows of the S matrix: null_basis_eval per point.
Matrix null_basis(const KernelSpec& spec, const Matrix& points);

/// Reproducing kernel R_J(s, t), definitional scalar evaluation. The gram()
/// path below reproduces it through the dispatch kernels to 1e-12.
double rk_eval(const KernelSpec& spec, const Vector& s, const Vector& t);

/// |A| x |B| kernel matrix with entry (i,j) = R_J(A_i, B_j), assembled
/// column-by-column through the simd dispatch table. Builds R_* (A = sample,
/// B = basis) and R_** (A = B = basis) of the restricted problem.
Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

}  // namespace sfs
