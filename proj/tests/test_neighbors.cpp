#include "doctest.h"

#include <vector>

#include "sfspline/design.hpp"
#include "sfspline/errors.hpp"
#include "sfspline/neighbors.hpp"
#include "sfspline/rng.hpp"

using namespace sfs;

namespace {

// Brute-force oracle with the same tie rule: smallest (distance, row index).
Index scan_nearest(const Matrix& x, const Vector& q) {
    Index best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < x.rows(); ++i) {
        const double d2 = (x.row(i).transpose() - q).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

Matrix random_points(Index n, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
    return x;
}

}  // namespace

TEST_CASE("kd-tree: singleton") {
    Matrix x(1, 3);
    x << 0.2, 0.8, 0.5;
    const KdTree tree(x);
    Vector q(3);
    q << 0.9, 0.1, 0.4;
    CHECK(tree.nearest(q) == 0);
    CHECK(tree.size() == 1);
    CHECK(tree.dims() == 3);
}

TEST_CASE("kd-tree: matches linear scan on large random instances") {
    for (Index d : {Index{1}, Index{2}, Index{3}, Index{6}}) {
        const Matrix x = random_points(1000, d, 10 + static_cast<std::uint64_t>(d));
        const KdTree tree(x);
        Rng rng(555);
        for (int t = 0; t < 200; ++t) {
            Vector q(d);
            for (Index j = 0; j < d; ++j) q(j) = 1.2 * rng.uniform() - 0.1;
            CHECK(tree.nearest(q) == scan_nearest(x, q));
        }
        // Points themselves are their own nearest neighbors.
        for (Index i = 0; i < 50; ++i) {
            const Index row = (13 * i) % x.rows();
            CHECK(tree.nearest(Vector(x.row(row).transpose())) == row);
        }
    }
}

TEST_CASE("kd-tree: exact ties go to the smallest row index") {
    Matrix x(6, 2);
    x << 0.3, 0.3,  // rows 1,3,4 duplicate row 0's location later
        0.7, 0.7, 0.3, 0.3, 0.3, 0.3, 0.9, 0.1, 0.1, 0.9;
    const KdTree tree(x, 2);
    Vector q(2);
    q << 0.3, 0.3;
    CHECK(tree.nearest(q) == 0);
    // Equidistant distinct points: (0.9,0.1) and (0.1,0.9) from (0.5,0.5).
    q << 0.5, 0.5;
    CHECK(tree.nearest(q) == scan_nearest(x, q));
}

TEST_CASE("kd-tree: small leaves and skewed data still match the oracle") {
    Matrix x = random_points(257, 2, 99);
    x.col(1) *= 1e-6;  // nearly collinear: stresses the split heuristic
    const KdTree tree(x, 1);
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        Vector q(2);
        q << rng.uniform(), rng.uniform() * 1e-6;
        CHECK(tree.nearest(q) == scan_nearest(x, q));
    }
}

TEST_CASE("kd-tree: eps-approximate results are within the stated factor") {
    const Matrix x = random_points(2000, 3, 42);
    const KdTree tree(x);
    Rng rng(43);
    const double eps = 0.5;
    for (int t = 0; t < 200; ++t) {
        Vector q(3);
        for (Index j = 0; j < 3; ++j) q(j) = rng.uniform();
        const Index approx = tree.nearest(q.data(), eps);
        const Index exact = scan_nearest(x, q);
        const double da = (x.row(approx).transpose() - q).norm();
        const double de = (x.row(exact).transpose() - q).norm();
        CHECK(da <= (1.0 + eps) * de + 1e-15);
    }
}

TEST_CASE("select_nearest: identity on exact matches, oracle on random ones") {
    const Matrix x = random_points(500, 3, 77);
    const KdTree tree(x);

    // Design points that are sample rows come back as those rows.
    Matrix subset(20, 3);
    for (Index i = 0; i < 20; ++i) subset.row(i) = x.row(25 * i);
    const auto ids = select_nearest(tree, subset);
    for (Index i = 0; i < 20; ++i) CHECK(ids[static_cast<std::size_t>(i)] == 25 * i);

    const Matrix design = generate_design(DesignMethod::sobol, 20, 3, 0).points;
    const auto hits = select_nearest(tree, design);
    REQUIRE(hits.size() == 20);
    for (Index i = 0; i < 20; ++i)
        CHECK(hits[static_cast<std::size_t>(i)] ==
              scan_nearest(x, Vector(design.row(i).transpose())));
}

TEST_CASE("kd-tree: input validation") {
    CHECK_THROWS_AS(KdTree(Matrix(0, 2)), invalid_input);
    Matrix x(3, 2);
    x.setConstant(0.5);
    const KdTree tree(x);
    Vector q(3);
    q.setZero();
    CHECK_THROWS_AS(tree.nearest(q), invalid_input);
    CHECK_THROWS_AS(select_nearest(tree, Matrix::Zero(2, 3)), invalid_input);
}
