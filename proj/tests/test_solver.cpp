#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/QR>

#include "sfspline/errors.hpp"
#include "sfspline/kernels.hpp"
#include "sfspline/rng.hpp"
#include "sfspline/solver.hpp"

using namespace sfs;

namespace {

Dataset random_dataset(Index n, Index d, std::uint64_t seed, double noise_sd) {
    Rng rng(seed);
    Dataset data;
    data.x.resize(n, d);
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Index j = 0; j < d; ++j) {
            data.x(i, j) = rng.uniform();
            s += data.x(i, j);
        }
        data.y(i) = std::sin(2.0 * M_PI * s / static_cast<double>(d)) +
                    0.5 * data.x(i, 0) + noise_sd * rng.normal();
    }
    return data;
}

BasisSelection all_rows(Index n) {
    BasisSelection sel;
    sel.indices.resize(static_cast<std::size_t>(n));
    std::iota(sel.indices.begin(), sel.indices.end(), Index{0});
    sel.method = SelectionMethod::uniform;
    sel.seed = 0;
    sel.q_requested = n;
    return sel;
}

BasisSelection first_rows(Index q) {
    BasisSelection sel = all_rows(q);
    sel.q_requested = q;
    return sel;
}

// The restricted criterion rebuilt from the public kernel API, including the
// documented 1e-10 * mean-diagonal assembly jitter on R_**, so that solver
// solutions can be judged against the exact objective they minimize.
struct CriterionParts {
    Matrix s;
    Matrix rstar;
    Matrix rss;
};

CriterionParts criterion_parts(const Dataset& data, const Matrix& basis,
                               const KernelSpec& spec) {
    CriterionParts p;
    p.s = null_basis(spec, data.x);
    p.rstar = gram(spec, data.x, basis);
    Matrix rss = gram(spec, basis, basis);
    rss = 0.5 * (rss + rss.transpose()).eval();
    rss.diagonal().array() += 1e-10 * rss.diagonal().cwiseAbs().mean();
    p.rss = rss;
    return p;
}

double criterion_value(const CriterionParts& p, const Dataset& data,
                       const Vector& null_coef, const Vector& kernel_coef,
                       double lambda) {
    const Vector resid = data.y - p.s * null_coef - p.rstar * kernel_coef;
    return resid.squaredNorm() + static_cast<double>(data.rows()) * lambda *
                                     kernel_coef.dot(p.rss * kernel_coef);
}

Matrix random_cube_points(Index n, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
    return x;
}

}  // namespace

TEST_CASE("full oracle: n=2 hand-solved system") {
    // x = {1/4, 3/4}, y = {1, 2}, lambda = 1/10. With m = 2 the null space
    // already interpolates two points, so the exact minimizer is the line
    // 3/2 + 2*k1(x) with zero kernel coefficients.
    Dataset data;
    data.x.resize(2, 1);
    data.x << 0.25, 0.75;
    data.y.resize(2);
    data.y << 1.0, 2.0;
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);

    const FittedSpline fit = fit_full_oracle(data, spec, 0.1);
    CHECK(fit.null_coef(0) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.null_coef(1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.kernel_coef.cwiseAbs().maxCoeff() < 1e-8);

    Matrix probe(3, 1);
    probe << 0.1, 0.5, 0.9;
    const Vector pred = predict(fit, probe);
    CHECK(pred(0) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(pred(1) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(pred(2) == doctest::Approx(2.3).epsilon(1e-10));

    // The restricted path with both rows selected solves the same criterion.
    const FittedSpline rfit = fit_restricted(data, all_rows(2), spec, 0.1);
    const Vector rpred = predict(rfit, probe);
    CHECK((rpred - pred).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("restricted solve: n=3 frozen symbolic coefficients") {
    // x = {1/8, 1/2, 7/8}, y = {1, -1, 2}, lambda = 1/100. Exact rational
    // solution of the normal equations:
    //   d = (18709/29376, 4/3), c = (32000/1377, -64000/1377, 32000/1377).
    Dataset data;
    data.x.resize(3, 1);
    data.x << 0.125, 0.5, 0.875;
    data.y.resize(3);
    data.y << 1.0, -1.0, 2.0;
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);

    const double d0 = 18709.0 / 29376.0;
    const double d1 = 4.0 / 3.0;
    const double c0 = 32000.0 / 1377.0;
    const double c1 = -64000.0 / 1377.0;
    const double fitted[3] = {0.30283224400871459695, 0.39433551198257080610,
                              1.3028322440087145970};

    // The dense oracle adds no jitter, so it tracks the rationals tightly.
    const FittedSpline ofit = fit_full_oracle(data, spec, 0.01);
    CHECK(ofit.null_coef(0) == doctest::Approx(d0).epsilon(1e-9));
    CHECK(ofit.null_coef(1) == doctest::Approx(d1).epsilon(1e-9));
    CHECK(ofit.kernel_coef(0) == doctest::Approx(c0).epsilon(1e-9));
    CHECK(ofit.kernel_coef(1) == doctest::Approx(c1).epsilon(1e-9));
    CHECK(ofit.kernel_coef(2) == doctest::Approx(c0).epsilon(1e-9));

    // The restricted path carries the 1e-10 assembly jitter; coefficients
    // move at most O(kappa * 1e-10), fitted values far less.
    const FittedSpline rfit = fit_restricted(data, all_rows(3), spec, 0.01);
    CHECK(rfit.null_coef(0) == doctest::Approx(d0).epsilon(1e-4));
    CHECK(rfit.null_coef(1) == doctest::Approx(d1).epsilon(1e-4));
    CHECK(rfit.kernel_coef(0) == doctest::Approx(c0).epsilon(1e-4));
    CHECK(rfit.kernel_coef(1) == doctest::Approx(c1).epsilon(1e-4));
    CHECK(rfit.kernel_coef(2) == doctest::Approx(c0).epsilon(1e-4));

    for (const FittedSpline* fit : {&ofit, &rfit}) {
        const Vector pred = predict(*fit, data.x);
        for (int i = 0; i < 3; ++i)
            CHECK(pred(i) == doctest::Approx(fitted[i]).epsilon(1e-7));
    }

    CHECK(rfit.diag.edf > 0.0);
    CHECK(rfit.diag.edf < 3.0);
    CHECK(rfit.diag.fit_seconds >= 0.0);
    CHECK(rfit.diag.q_eff == 3);
}

TEST_CASE("restricted with every row selected reproduces the dense oracle") {
    struct Case {
        KernelFamily family;
        Index d;
        Index n;
    };
    for (const Case& c : {Case{KernelFamily::cubic_1d, 1, 120},
                          Case{KernelFamily::ssanova_2way, 2, 120},
                          Case{KernelFamily::thinplate_2d, 2, 80}}) {
        const KernelSpec spec = make_kernel_spec(c.family, c.d);
        const Dataset data = random_dataset(c.n, c.d, 11 + c.n, 0.2);
        const Matrix test_pts = random_cube_points(300, c.d, 99);
        for (const double lambda : {1e-4, 1e-2}) {
            const FittedSpline full = fit_full_oracle(data, spec, lambda);
            const FittedSpline restr =
                fit_restricted(data, all_rows(c.n), spec, lambda);
            const Vector pf = predict(full, test_pts);
            const Vector pr = predict(restr, test_pts);
            CHECK((pf - pr).norm() <= 1e-6 * (pf.norm() + 1e-12));
        }
    }
}

TEST_CASE("huge lambda collapses the fit onto the null-space least squares") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const Dataset data = random_dataset(150, 1, 4, 0.3);
    const FittedSpline fit = fit_restricted(data, first_rows(40), spec, 1e8);

    CHECK(fit.kernel_coef.norm() <= 1e-4 * data.y.norm());

    const Matrix s = null_basis(spec, data.x);
    const Vector d_ols = s.colPivHouseholderQr().solve(data.y);
    CHECK((fit.null_coef - d_ols).norm() <= 1e-4 * d_ols.norm());
}

TEST_CASE("tiny lambda nearly interpolates noiseless smooth data") {
    const Index n = 50;
    Rng rng(21);
    Dataset data;
    data.x.resize(n, 1);
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        data.x(i, 0) = rng.uniform();
        data.y(i) = std::sin(2.0 * M_PI * data.x(i, 0));
    }
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const FittedSpline fit = fit_restricted(data, all_rows(n), spec, 1e-10);
    const Vector resid = data.y - predict(fit, data.x);
    const double rms = std::sqrt(resid.squaredNorm() / n);
    const double yrms = std::sqrt(data.y.squaredNorm() / n);
    CHECK(rms <= 1e-4 * yrms);
}

TEST_CASE("criterion: monotone in lambda at a frozen solution, minimized by the solver") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const Dataset data = random_dataset(100, 1, 7, 0.2);
    const BasisSelection sel = first_rows(30);
    const Matrix basis = data.x.topRows(30);
    const CriterionParts parts = criterion_parts(data, basis, spec);

    const FittedSpline frozen = fit_restricted(data, sel, spec, 1e-3);
    double lambda = 1e-3;
    double prev = criterion_value(parts, data, frozen.null_coef,
                                  frozen.kernel_coef, lambda);
    for (int k = 0; k < 10; ++k) {
        lambda *= 2.0;
        const double at_frozen = criterion_value(parts, data, frozen.null_coef,
                                                 frozen.kernel_coef, lambda);
        CHECK(at_frozen >= prev - 1e-12 * std::max(1.0, prev));

        // The fresh minimizer at the doubled lambda must of course do at
        // least as well as the frozen coefficients under that lambda.
        const FittedSpline refit = fit_restricted(data, sel, spec, lambda);
        const double at_refit = criterion_value(parts, data, refit.null_coef,
                                                refit.kernel_coef, lambda);
        CHECK(at_refit <= at_frozen + 1e-10 * std::max(1.0, at_frozen));
        prev = at_frozen;
    }
}

TEST_CASE("criterion: 50 random coefficient perturbations never improve it") {
    struct Case {
        KernelFamily family;
        Index d;
    };
    for (const Case& c :
         {Case{KernelFamily::cubic_1d, 1}, Case{KernelFamily::ssanova_2way, 2}}) {
        const KernelSpec spec = make_kernel_spec(c.family, c.d);
        const Dataset data = random_dataset(80, c.d, 40 + c.d, 0.25);
        const Index q = 25;
        const Matrix basis = data.x.topRows(q);
        const CriterionParts parts = criterion_parts(data, basis, spec);

        const FittedSpline fit = fit_restricted(data, first_rows(q), spec, 1e-2);
        REQUIRE(fit.diag.jitter == 0.0);  // else the objective would differ
        const double j0 = criterion_value(parts, data, fit.null_coef,
                                          fit.kernel_coef, 1e-2);

        Rng rng(5);
        const Index m = spec.null_dim;
        for (int t = 0; t < 50; ++t) {
            Vector u(m + q);
            for (Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
            u *= 1e-3 / u.norm();
            for (const double sign : {1.0, -1.0}) {
                const Vector d_pert = fit.null_coef + sign * u.head(m);
                const Vector c_pert = fit.kernel_coef + sign * u.tail(q);
                const double j = criterion_value(parts, data, d_pert, c_pert, 1e-2);
                CHECK(j >= j0 - 1e-10 * std::max(1.0, j0));
            }
        }
    }
}

TEST_CASE("penalty seminorm of the kernel coefficients shrinks as lambda grows") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::ssanova_2way, 2);
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset data = random_dataset(150, 2, seed, 0.3);
        const Index q = 40;
        const Matrix basis = data.x.topRows(q);
        const CriterionParts parts = criterion_parts(data, basis, spec);

        double prev = -1.0;
        for (int i = 0; i < 12; ++i) {
            const double lambda = std::pow(10.0, -6.0 + 8.0 * i / 11.0);
            const FittedSpline fit = fit_restricted(data, first_rows(q), spec, lambda);
            const double seminorm = std::sqrt(std::max(
                0.0, fit.kernel_coef.dot(parts.rss * fit.kernel_coef)));
            if (prev >= 0.0) CHECK(seminorm <= prev + 1e-10 * (1.0 + prev));
            prev = seminorm;
        }
    }
}

TEST_CASE("gcv: edf strictly decreasing along the default grid") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const Dataset data = random_dataset(200, 1, 13, 0.3);
    const Matrix basis = data.x.topRows(30);
    const AssembledSystem sys(data, basis, spec);

    double prev = std::numeric_limits<double>::infinity();
    for (const double lambda : default_lambda_grid()) {
        const AssembledSystem::Solution sol = sys.solve(lambda);
        CHECK(sol.edf < prev);
        CHECK(sol.edf > 0.0);
        prev = sol.edf;
    }
}

TEST_CASE("gcv_select: grid order cannot matter and refinement only helps") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const Dataset data = random_dataset(300, 1, 17, 0.4);
    const BasisSelection sel = first_rows(40);

    const GcvResult sorted_run = gcv_select(data, sel, spec);

    std::vector<double> shuffled = default_lambda_grid();
    std::rotate(shuffled.begin(), shuffled.begin() + 17, shuffled.end());
    std::swap(shuffled[0], shuffled[5]);
    const GcvResult shuffled_run = gcv_select(data, sel, spec, shuffled);

    CHECK(sorted_run.lambda == shuffled_run.lambda);
    REQUIRE(sorted_run.score.size() == shuffled_run.score.size());
    for (std::size_t i = 0; i < sorted_run.score.size(); ++i)
        CHECK(sorted_run.score[i] == shuffled_run.score[i]);
    CHECK(std::is_sorted(sorted_run.grid.begin(), sorted_run.grid.end()));

    const double grid_best =
        *std::min_element(sorted_run.score.begin(), sorted_run.score.end());
    const AssembledSystem sys(data, Matrix(data.x.topRows(40)), spec);
    CHECK(sys.gcv_score(sorted_run.lambda) <= grid_best + 1e-12);
    CHECK(sorted_run.fit.lambda == sorted_run.lambda);
    CHECK(sorted_run.fit.diag.edf > 0.0);
    CHECK(sorted_run.sweep_seconds >= 0.0);
}

TEST_CASE("gcv_select: constant response leaves nothing for the kernel part") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::cubic_1d, 1);
    Dataset data = random_dataset(120, 1, 23, 0.0);
    data.y.setConstant(3.0);
    const BasisSelection sel = first_rows(25);

    const GcvResult res = gcv_select(data, sel, spec);
    const double v0 = res.score.front();
    for (const double v : res.score) CHECK(v == doctest::Approx(v0).epsilon(1e-10));
    // The exact kernel coefficients are zero; in floating point the tie is
    // broken at the smallest grid lambda, where the normal equations carry a
    // condition number near 1e12, so only ~1e-4 of coefficient noise is
    // resolvable. What must survive is a flat fitted function.
    CHECK(res.fit.kernel_coef.cwiseAbs().maxCoeff() < 1e-3);
    CHECK(res.fit.null_coef(0) == doctest::Approx(3.0).epsilon(1e-8));
    const Vector flat = predict(res.fit, random_cube_points(200, 1, 77));
    CHECK((flat.array() - 3.0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("predict: loop oracle, zero coefficients, training rows") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::ssanova_2way, 2);
    const Dataset data = random_dataset(90, 2, 29, 0.2);
    const FittedSpline fit = fit_restricted(data, first_rows(20), spec, 1e-3);

    const Matrix pts = random_cube_points(20, 2, 61);
    const Vector fast = predict(fit, pts);
    for (Index i = 0; i < pts.rows(); ++i) {
        const Vector x = pts.row(i).transpose();
        double acc = null_basis_eval(spec, x).dot(fit.null_coef);
        for (Index b = 0; b < fit.basis.rows(); ++b)
            acc += fit.kernel_coef(b) *
                   rk_eval(spec, Vector(fit.basis.row(b).transpose()), x);
        CHECK(std::abs(fast(i) - acc) <= 1e-10);
    }

    // In-sample fitted vector through the same formula, at the training rows.
    const Vector at_train = predict(fit, data.x);
    const Vector manual = null_basis(spec, data.x) * fit.null_coef +
                          gram(spec, data.x, fit.basis) * fit.kernel_coef;
    CHECK((at_train - manual).cwiseAbs().maxCoeff() <= 1e-10);

    FittedSpline zeroed = fit;
    zeroed.null_coef.setZero();
    zeroed.kernel_coef.setZero();
    CHECK(predict(zeroed, pts).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(predict(fit, random_cube_points(5, 3, 1)), invalid_input);
}

TEST_CASE("solver input validation") {
    const KernelSpec cubic = make_kernel_spec(KernelFamily::cubic_1d, 1);
    const Dataset data = random_dataset(30, 1, 3, 0.1);

    CHECK_THROWS_AS(fit_restricted(data, first_rows(10), cubic, 0.0), invalid_input);
    CHECK_THROWS_AS(fit_restricted(data, first_rows(10), cubic, -1.0), invalid_input);
    CHECK_THROWS_AS(
        fit_restricted(data, first_rows(10), cubic,
                       std::numeric_limits<double>::quiet_NaN()),
        invalid_input);

    BasisSelection empty;
    empty.method = SelectionMethod::uniform;
    empty.seed = 0;
    empty.q_requested = 0;
    CHECK_THROWS_AS(fit_restricted(data, empty, cubic, 1e-2), invalid_input);

    BasisSelection bad = first_rows(3);
    bad.indices[1] = 99;
    CHECK_THROWS_AS(fit_restricted(data, bad, cubic, 1e-2), invalid_input);

    // m > n leaves the least-squares block rank deficient.
    const KernelSpec wide = make_kernel_spec(KernelFamily::ssanova_2way, 3);
    const Dataset tiny = random_dataset(4, 3, 9, 0.1);
    CHECK_THROWS_WITH_AS(fit_restricted(tiny, all_rows(4), wide, 1e-2),
                         doctest::Contains("rank"), invalid_input);

    // The dense oracle is a test harness tool, capped and saying what to use.
    const Dataset big = random_dataset(2001, 1, 1, 0.1);
    CHECK_THROWS_WITH_AS(fit_full_oracle(big, cubic, 1e-2),
                         doctest::Contains("fit_restricted"), capability_error);

    CHECK_THROWS_AS(gcv_select(data, first_rows(10), cubic, {}), invalid_input);
    CHECK_THROWS_AS(gcv_select(data, first_rows(10), cubic, {1e-3, 0.0}),
                    invalid_input);

    // Thin-plate needs at least m basis points to carry its side condition.
    const KernelSpec tps = make_kernel_spec(KernelFamily::thinplate_2d, 2);
    const Dataset d2 = random_dataset(30, 2, 5, 0.1);
    CHECK_THROWS_AS(fit_restricted(d2, first_rows(2), tps, 1e-2), invalid_input);
}
