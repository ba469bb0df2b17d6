#pragma once

#include <vector>

#include <Eigen/Cholesky>

#include "sfspline/kernels.hpp"
#include "sfspline/selection.hpp"
#include "sfspline/types.hpp"

namespace sfs {

struct FitDiagnostics {
    double edf = 0.0;          // tr A(lambda)
    double gcv = 0.0;          // V(lambda)
    double fit_seconds = 0.0;  // wall time of the fitting call
    double jitter = 0.0;       // diagonal jitter the factorization needed
    Index q_requested = 0;
    Index q_eff = 0;
};

/// Everything needed to predict anywhere: basis locations in the unit cube,
/// null-space and kernel coefficients, the smoothing parameter.
struct FittedSpline {
    KernelSpec spec;
    Matrix basis;        // q_eff x d
    Vector null_coef;    // m
    Vector kernel_coef;  // q_eff
    double lambda = 0.0;
    FitDiagnostics diag;
};

/// The restricted problem assembled once for a fixed (data, basis) pair so a
/// lambda sweep costs O((m+q)^3) per value instead of O(n q^2).
///
/// Normal equations: K(lambda) beta = M^T Y with M = [S R_*], K = M^T M +
/// n lambda P, P = blockdiag(0, R_**). R_** carries a 1e-10 * mean-diagonal
/// jitter from assembly; if the Cholesky factorization still fails, the
/// jitter escalates through {1e-10, 1e-8, 1e-6} * mean diag of K before
/// giving up with a conditioning error.
///
/// For the thin-plate family the kernel coefficients are constrained to
/// S_*^T c = 0 (S_* = null basis at the basis points) by reparameterizing
/// c = Z gamma with Z an orthonormal basis of the constraint null space.
class AssembledSystem {
public:
    AssembledSystem(const Dataset& data, const Matrix& basis_points,
                    const KernelSpec& spec);

    struct Solution {
        Vector null_coef;
        Vector kernel_coef;
        double edf;
        double gcv;
        double jitter;
    };

    /// Coefficients, edf and GCV score at one lambda.
    Solution solve(double lambda) const;

    /// V(lambda) alone (same factorization cost, no coefficient extraction).
    double gcv_score(double lambda) const;

    Index n() const { return n_; }
    Index q() const { return static_cast<Index>(basis_.rows()); }

private:
    Eigen::LLT<Matrix> factor(double lambda, double* jitter_used) const;
    void scores(const Eigen::LLT<Matrix>& llt, const Vector& beta, double& edf,
                double& gcv) const;

    Index n_;
    KernelSpec spec_;
    Matrix basis_;  // q x d
    Matrix z_;      // q x qz constraint basis (empty when unconstrained)
    Matrix g_;      // p x p, M^T M in the reduced parameterization
    Matrix pen_;    // p x p, blockdiag(0, Z^T R_** Z)
    Vector mty_;    // p
    double yty_;
};

/// Minimizer of the restricted penalized least-squares criterion
///   ||Y - S d - R_* c||^2 + n lambda c^T R_** c
/// at the given basis rows. diag.fit_seconds covers this whole call,
/// assembly included.
FittedSpline fit_restricted(const Dataset& data, const BasisSelection& sel,
                            const KernelSpec& spec, double lambda);

/// Dense full-basis solve with a representer at every sample row, through an
/// independent route (the augmented stationarity system
/// [[R + n lambda I, S], [S^T, 0]] [c; d] = [Y; 0] under full-pivot LU).
/// Testing oracle only: refuses n > 2000, and its diagnostics carry timing
/// only.
FittedSpline fit_full_oracle(const Dataset& data, const KernelSpec& spec,
                             double lambda);

/// 40 log-spaced values in [1e-8, 1e2].
std::vector<double> default_lambda_grid();

struct GcvResult {
    double lambda;              // the selected smoothing parameter
    FittedSpline fit;           // final fit at that lambda
    std::vector<double> grid;   // evaluated grid values
    std::vector<double> score;  // V(lambda) per grid value
    double sweep_seconds;       // assembly + sweep + refinement time
};

/// Grid search of V(lambda) followed by one golden-section refinement around
/// the grid minimizer (tolerance 1e-2 in log10 lambda).
GcvResult gcv_select(const Dataset& data, const BasisSelection& sel,
                     const KernelSpec& spec,
                     const std::vector<double>& grid = default_lambda_grid());

/// Sum_k d_k xi_k(x) + sum_i c_i R_J(basis_i, x) per row of x_new.
Vector predict(const FittedSpline& model, const Matrix& x_new);

}  // namespace sfs
