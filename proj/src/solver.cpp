#include "sfspline/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "sfspline/errors.hpp"

namespace sfs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw invalid_input("lambda must be positive and finite");
}

Matrix basis_rows(const Dataset& data, const BasisSelection& sel) {
    if (sel.q_eff() < 1) throw invalid_input("selection holds no basis rows");
    Matrix basis(sel.q_eff(), data.dims());
    for (Index i = 0; i < sel.q_eff(); ++i) {
        const Index row = sel.indices[static_cast<std::size_t>(i)];
        if (row < 0 || row >= data.rows())
            throw invalid_input("basis index " + std::to_string(row) +
                                " outside the dataset");
        basis.row(i) = data.x.row(row);
    }
    return basis;
}

}  // namespace

AssembledSystem::AssembledSystem(const Dataset& data, const Matrix& basis_points,
                                 const KernelSpec& spec)
    : n_(data.rows()), spec_(spec), basis_(basis_points) {
    const Index q = basis_.rows();
    const Index m = spec.null_dim;
    if (data.y.size() != n_) throw invalid_input("response length mismatch");
    if (m > n_)
        throw invalid_input("null-space dimension m = " + std::to_string(m) +
                            " exceeds n = " + std::to_string(n_) +
                            "; the least-squares part is rank deficient");

    const Matrix s = null_basis(spec, data.x);       // n x m
    const Matrix rstar = gram(spec, data.x, basis_); // n x q
    Matrix rss = gram(spec, basis_, basis_);         // q x q
    rss = 0.5 * (rss + rss.transpose()).eval();
    // Assembly-time jitter keeps a clean kernel Gram factorizable even with
    // nearly coincident basis points.
    rss.diagonal().array() += 1e-10 * rss.diagonal().cwiseAbs().mean();

    Index qz = q;
    Matrix rz = rstar;
    Matrix pz = rss;
    if (spec.family == KernelFamily::thinplate_2d) {
        // Semi-kernel: valid only under S_*^T c = 0, so solve for c = Z gamma.
        if (q < m)
            throw invalid_input("thin-plate fit needs at least m = " +
                                std::to_string(m) + " basis points");
        const Matrix sstar = null_basis(spec, basis_);
        Eigen::HouseholderQR<Matrix> qr(sstar);
        const Matrix full_q = qr.householderQ();
        z_ = full_q.rightCols(q - m);
        qz = q - m;
        rz = rstar * z_;
        pz = z_.transpose() * rss * z_;
    }

    const Index p = m + qz;
    g_.resize(p, p);
    g_.topLeftCorner(m, m) = s.transpose() * s;
    g_.topRightCorner(m, qz) = s.transpose() * rz;
    g_.bottomLeftCorner(qz, m) = g_.topRightCorner(m, qz).transpose();
    g_.bottomRightCorner(qz, qz) = rz.transpose() * rz;
    g_ = 0.5 * (g_ + g_.transpose()).eval();

    pen_ = Matrix::Zero(p, p);
    pen_.bottomRightCorner(qz, qz) = 0.5 * (pz + pz.transpose());

    mty_.resize(p);
    mty_.head(m) = s.transpose() * data.y;
    mty_.tail(qz) = rz.transpose() * data.y;
    yty_ = data.y.squaredNorm();
}

Eigen::LLT<Matrix> AssembledSystem::factor(double lambda, double* jitter_used) const {
    const Matrix k = g_ + (static_cast<double>(n_) * lambda) * pen_;
    const double mean_diag = k.diagonal().cwiseAbs().mean();
    for (const double scale : {0.0, 1e-10, 1e-8, 1e-6}) {
        Matrix kj = k;
        kj.diagonal().array() += scale * mean_diag;
        Eigen::LLT<Matrix> llt(kj);
        if (llt.info() == Eigen::Success) {
            *jitter_used = scale * mean_diag;
            return llt;
        }
    }
    const double pivot = Eigen::LDLT<Matrix>(k).vectorD().minCoeff();
    throw conditioning_error(
        "restricted normal equations stayed singular after jitter escalation "
        "(smallest pivot " +
            std::to_string(pivot) + ")",
        pivot);
}

void AssembledSystem::scores(const Eigen::LLT<Matrix>& llt, const Vector& beta,
                             double& edf, double& gcv) const {
    const double n = static_cast<double>(n_);
    edf = llt.solve(g_).trace();
    const double denom = n - edf;
    if (!(denom > 0.0))
        throw dof_error("tr(I - A) = " + std::to_string(denom) +
                        " <= 0; the smoother is saturated");
    const double rss =
        std::max(0.0, yty_ - 2.0 * beta.dot(mty_) + beta.dot(g_ * beta));
    gcv = n * rss / (denom * denom);
}

AssembledSystem::Solution AssembledSystem::solve(double lambda) const {
    check_lambda(lambda);
    Solution sol;
    const Eigen::LLT<Matrix> llt = factor(lambda, &sol.jitter);
    const Vector beta = llt.solve(mty_);
    scores(llt, beta, sol.edf, sol.gcv);
    const Index m = spec_.null_dim;
    sol.null_coef = beta.head(m);
    if (z_.size() > 0)
        sol.kernel_coef = z_ * beta.tail(beta.size() - m);
    else
        sol.kernel_coef = beta.tail(beta.size() - m);
    return sol;
}

double AssembledSystem::gcv_score(double lambda) const {
    return solve(lambda).gcv;
}

FittedSpline fit_restricted(const Dataset& data, const BasisSelection& sel,
                            const KernelSpec& spec, double lambda) {
    const auto t0 = Clock::now();
    check_lambda(lambda);
    const Matrix basis = basis_rows(data, sel);
    const AssembledSystem sys(data, basis, spec);
    const AssembledSystem::Solution sol = sys.solve(lambda);

    FittedSpline fit;
    fit.spec = spec;
    fit.basis = basis;
    fit.null_coef = sol.null_coef;
    fit.kernel_coef = sol.kernel_coef;
    fit.lambda = lambda;
    fit.diag = {sol.edf, sol.gcv, seconds_since(t0),
                sol.jitter, sel.q_requested, sel.q_eff()};
    return fit;
}

FittedSpline fit_full_oracle(const Dataset& data, const KernelSpec& spec,
                             double lambda) {
    const auto t0 = Clock::now();
    check_lambda(lambda);
    const Index n = data.rows();
    if (n > 2000)
        throw capability_error(
            "fit_full_oracle is a dense testing oracle limited to n <= 2000; "
            "use fit_restricted with a basis selection for larger samples");

    const Index m = spec.null_dim;
    const Matrix s = null_basis(spec, data.x);
    Matrix r = gram(spec, data.x, data.x);
    r = 0.5 * (r + r.transpose()).eval();

    // Stationarity of Eq class criterion: (R + n lambda I) c + S d = Y and
    // S^T c = 0; a full-pivot LU keeps this route independent of the
    // normal-equations path it serves as an oracle for.
    Matrix aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = r;
    aug.topLeftCorner(n, n).diagonal().array() += static_cast<double>(n) * lambda;
    aug.topRightCorner(n, m) = s;
    aug.bottomLeftCorner(m, n) = s.transpose();
    Vector rhs = Vector::Zero(n + m);
    rhs.head(n) = data.y;

    const Eigen::FullPivLU<Matrix> lu(aug);
    if (!lu.isInvertible())
        throw conditioning_error("full-basis augmented system is singular", 0.0);
    const Vector cd = lu.solve(rhs);

    FittedSpline fit;
    fit.spec = spec;
    fit.basis = data.x;
    fit.kernel_coef = cd.head(n);
    fit.null_coef = cd.tail(m);
    fit.lambda = lambda;
    fit.diag.fit_seconds = seconds_since(t0);
    fit.diag.q_requested = n;
    fit.diag.q_eff = n;
    return fit;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(40);
    for (int i = 0; i < 40; ++i)
        grid[static_cast<std::size_t>(i)] =
            std::pow(10.0, -8.0 + 10.0 * static_cast<double>(i) / 39.0);
    return grid;
}

GcvResult gcv_select(const Dataset& data, const BasisSelection& sel,
                     const KernelSpec& spec, const std::vector<double>& grid) {
    if (grid.empty()) throw invalid_input("gcv_select: empty lambda grid");
    for (double v : grid) check_lambda(v);

    const auto t0 = Clock::now();
    const Matrix basis = basis_rows(data, sel);
    const AssembledSystem sys(data, basis, spec);

    GcvResult res;
    res.grid = grid;
    std::sort(res.grid.begin(), res.grid.end());
    res.score.reserve(res.grid.size());

    std::size_t best_i = 0;
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        res.score.push_back(sys.gcv_score(res.grid[i]));
        if (res.score[i] < res.score[best_i]) best_i = i;
    }
    double best_lambda = res.grid[best_i];
    double best_score = res.score[best_i];

    // One golden-section pass between the grid neighbors of the minimizer.
    const std::size_t lo_i = best_i > 0 ? best_i - 1 : best_i;
    const std::size_t hi_i = best_i + 1 < res.grid.size() ? best_i + 1 : best_i;
    double a = std::log10(res.grid[lo_i]);
    double b = std::log10(res.grid[hi_i]);
    if (b - a > 1e-2) {
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        auto probe = [&](double x) {
            const double lambda = std::pow(10.0, x);
            const double v = sys.gcv_score(lambda);
            if (v < best_score) {
                best_score = v;
                best_lambda = lambda;
            }
            return v;
        };
        double c1 = b - gr * (b - a);
        double c2 = a + gr * (b - a);
        double f1 = probe(c1);
        double f2 = probe(c2);
        while (b - a > 1e-2) {
            if (f1 <= f2) {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - gr * (b - a);
                f1 = probe(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr * (b - a);
                f2 = probe(c2);
            }
        }
    }
    res.sweep_seconds = seconds_since(t0);

    const auto t1 = Clock::now();
    const AssembledSystem::Solution sol = sys.solve(best_lambda);
    res.lambda = best_lambda;
    res.fit.spec = spec;
    res.fit.basis = basis;
    res.fit.null_coef = sol.null_coef;
    res.fit.kernel_coef = sol.kernel_coef;
    res.fit.lambda = best_lambda;
    res.fit.diag = {sol.edf, sol.gcv, seconds_since(t1),
                    sol.jitter, sel.q_requested, sel.q_eff()};
    return res;
}

Vector predict(const FittedSpline& model, const Matrix& x_new) {
    if (x_new.cols() != model.spec.d)
        throw invalid_input("predict: points have " + std::to_string(x_new.cols()) +
                            " coordinates, model expects " +
                            std::to_string(model.spec.d));
    const Matrix s = null_basis(model.spec, x_new);
    const Matrix r = gram(model.spec, x_new, model.basis);
    return s * model.null_coef + r * model.kernel_coef;
}

}  // namespace sfs
