#include "sfspline/design.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>

#include "sfspline/errors.hpp"
#include "sfspline/rng.hpp"
#include "sfspline/simd/ops.hpp"

namespace sfs {

namespace {

// Primitive-polynomial degree, coefficient bits, and initial direction
// numbers for Sobol dimensions 2..10 (dimension 1 is the van der Corput
// sequence and needs no table).
struct SobolRow {
    int s;
    std::uint32_t a;
    std::uint32_t m[5];
};

constexpr SobolRow kSobolTable[] = {
    {1, 0, {1}},              // dim 2
    {2, 1, {1, 3}},           // dim 3
    {3, 1, {1, 3, 1}},        // dim 4
    {3, 2, {1, 1, 1}},        // dim 5
    {4, 1, {1, 1, 3, 3}},     // dim 6
    {4, 4, {1, 3, 5, 13}},    // dim 7
    {5, 2, {1, 1, 5, 5, 17}}, // dim 8
    {5, 4, {1, 1, 5, 5, 5}},  // dim 9
    {5, 7, {1, 1, 7, 11, 19}} // dim 10
};

constexpr int kSobolBits = 32;

// 32 direction numbers for one dimension, each shifted so bit k of the point
// index drives v[k] (v[k] = m_{k+1} * 2^{31-k}).
void direction_numbers(Index dim, std::uint32_t v[kSobolBits]) {
    if (dim == 0) {
        for (int k = 0; k < kSobolBits; ++k) v[k] = 1u << (31 - k);
        return;
    }
    const SobolRow& row = kSobolTable[dim - 1];
    const int s = row.s;
    for (int k = 0; k < s; ++k) v[k] = row.m[k] << (31 - k);
    for (int k = s; k < kSobolBits; ++k) {
        v[k] = v[k - s] ^ (v[k - s] >> s);
        for (int j = 1; j < s; ++j)
            if ((row.a >> (s - 1 - j)) & 1u) v[k] ^= v[k - j];
    }
}

void check_dims(Index q, Index d) {
    if (q < 1) throw invalid_input("design: q must be >= 1");
    if (d < 1) throw invalid_input("design: d must be >= 1");
    if (d > kMaxDesignDim)
        throw capability_error("design: d = " + std::to_string(d) +
                               " exceeds the bundled Sobol direction numbers "
                               "(max d = " +
                               std::to_string(kMaxDesignDim) + ")");
}

// Columns of an Eigen matrix as an SoA pointer array for the simd kernels.
std::vector<const double*> column_ptrs(const Matrix& points) {
    std::vector<const double*> cols(static_cast<std::size_t>(points.cols()));
    for (Index j = 0; j < points.cols(); ++j) cols[static_cast<std::size_t>(j)] = points.col(j).data();
    return cols;
}

// Discrepancy score of one box corner: the supremum over half-open boxes is
// approached from inside (strict count) or from the closure (closed count),
// so both residuals are formed and the larger kept.
double corner_score(const double* const* cols, std::size_t d, std::size_t n,
                    const double* corner) {
    std::size_t open = 0;
    std::size_t closed = 0;
    simd::active_ops().count_open_closed(cols, d, n, corner, &open, &closed);
    double vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) vol *= corner[j];
    const double nn = static_cast<double>(n);
    return std::max(vol - static_cast<double>(open) / nn,
                    static_cast<double>(closed) / nn - vol);
}

// Candidate corner coordinates per dimension: the sorted unique point
// coordinates plus 1.0 (the supremum is attained on this grid's closure).
std::vector<std::vector<double>> corner_candidates(const Matrix& points) {
    std::vector<std::vector<double>> cand(static_cast<std::size_t>(points.cols()));
    for (Index j = 0; j < points.cols(); ++j) {
        auto& cj = cand[static_cast<std::size_t>(j)];
        cj.assign(points.col(j).data(), points.col(j).data() + points.rows());
        cj.push_back(1.0);
        std::sort(cj.begin(), cj.end());
        cj.erase(std::unique(cj.begin(), cj.end()), cj.end());
    }
    return cand;
}

void check_unit_cube(const Matrix& points) {
    if (points.rows() < 1 || points.cols() < 1)
        throw invalid_input("discrepancy: point set must be non-empty");
    for (Index j = 0; j < points.cols(); ++j)
        for (Index i = 0; i < points.rows(); ++i) {
            const double v = points(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw invalid_input(
                    "discrepancy: coordinate outside [0,1] at row " +
                    std::to_string(i) + ", column " + std::to_string(j));
        }
}

}  // namespace

std::string to_string(DesignMethod m) {
    switch (m) {
        case DesignMethod::sobol: return "sobol";
        case DesignMethod::lhs: return "lhs";
        case DesignMethod::centered_grid: return "centered-grid";
    }
    return "?";
}

DesignMethod design_method_from_string(const std::string& name) {
    if (name == "sobol") return DesignMethod::sobol;
    if (name == "lhs") return DesignMethod::lhs;
    if (name == "grid" || name == "centered-grid" || name == "centered_grid")
        return DesignMethod::centered_grid;
    throw invalid_input("design: unknown method '" + name +
                        "' (expected sobol, lhs, or grid)");
}

Matrix sobol_points(Index q, Index d, std::uint64_t start) {
    check_dims(q, d);
    if (start + static_cast<std::uint64_t>(q) > (std::uint64_t{1} << kSobolBits))
        throw capability_error("design: sobol index range exceeds 2^32");

    Matrix out(q, d);
    std::uint32_t v[kSobolBits];
    for (Index j = 0; j < d; ++j) {
        direction_numbers(j, v);
        // Gray-code state at index `start`: XOR of v[k] over the set bits of
        // gray(start), so a continued sequence matches a from-zero run.
        std::uint32_t state = 0;
        const std::uint64_t gray = start ^ (start >> 1);
        for (int k = 0; k < kSobolBits; ++k)
            if ((gray >> k) & 1u) state ^= v[k];

        for (Index i = 0; i < q; ++i) {
            out(i, j) = static_cast<double>(state) * 0x1.0p-32;
            const std::uint64_t next = start + static_cast<std::uint64_t>(i) + 1;
            state ^= v[std::countr_zero(next)];
        }
    }
    return out;
}

DesignPointSet generate_design(DesignMethod method, Index q, Index d,
                               std::uint64_t seed) {
    check_dims(q, d);
    DesignPointSet set;
    set.method = method;
    set.seed = seed;
    switch (method) {
        case DesignMethod::sobol:
            set.points = sobol_points(q, d, 0);
            break;
        case DesignMethod::lhs: {
            // Midpoint Latin hypercube: one random stratum permutation per
            // coordinate, each point at the center of its stratum.
            set.points.resize(q, d);
            std::vector<Index> perm(static_cast<std::size_t>(q));
            for (Index j = 0; j < d; ++j) {
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
                std::iota(perm.begin(), perm.end(), Index{0});
                for (Index i = q - 1; i > 0; --i) {
                    const auto k = static_cast<Index>(
                        rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
                    std::swap(perm[static_cast<std::size_t>(i)],
                              perm[static_cast<std::size_t>(k)]);
                }
                for (Index i = 0; i < q; ++i)
                    set.points(i, j) =
                        (static_cast<double>(perm[static_cast<std::size_t>(i)]) + 0.5) /
                        static_cast<double>(q);
            }
            break;
        }
        case DesignMethod::centered_grid:
            if (d != 1)
                throw capability_error(
                    "design: centered-grid supports d = 1 only");
            set.points.resize(q, 1);
            for (Index i = 0; i < q; ++i)
                set.points(i, 0) =
                    (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(q));
            break;
    }
    return set;
}

double local_discrepancy(const Matrix& points, const std::vector<double>& a) {
    check_unit_cube(points);
    if (static_cast<Index>(a.size()) != points.cols())
        throw invalid_input("local_discrepancy: corner has " +
                            std::to_string(a.size()) + " coordinates, points have " +
                            std::to_string(points.cols()));
    for (std::size_t j = 0; j < a.size(); ++j)
        if (!(a[j] >= 0.0 && a[j] <= 1.0))
            throw invalid_input("local_discrepancy: corner coordinate " +
                                std::to_string(j) + " outside [0,1]");

    const auto cols = column_ptrs(points);
    const auto d = static_cast<std::size_t>(points.cols());
    const auto n = static_cast<std::size_t>(points.rows());
    std::size_t open = 0;
    std::size_t closed = 0;
    simd::active_ops().count_open_closed(cols.data(), d, n, a.data(), &open,
                                         &closed);
    double vol = 1.0;
    for (double aj : a) vol *= aj;
    return std::abs(static_cast<double>(open) / static_cast<double>(n) - vol);
}

StarDiscrepancy star_discrepancy(const Matrix& points, DiscrepancyMode mode,
                                 std::uint64_t seed) {
    check_unit_cube(points);
    const auto n = static_cast<std::size_t>(points.rows());
    const auto d = static_cast<std::size_t>(points.cols());
    const auto cols = column_ptrs(points);
    const auto cand = corner_candidates(points);

    double best = 0.0;
    std::vector<double> corner(d);

    if (mode == DiscrepancyMode::exact) {
        const double work =
            std::pow(static_cast<double>(n), static_cast<double>(d)) *
            static_cast<double>(n);
        if (work > 1e8)
            throw budget_error(
                "star_discrepancy: exact enumeration needs q^d*q = " +
                std::to_string(work) +
                " point-corner checks (budget 1e8); use approximate mode");

        // Odometer over the Cartesian product of candidate coordinates.
        std::vector<std::size_t> idx(d, 0);
        for (;;) {
            for (std::size_t j = 0; j < d; ++j) corner[j] = cand[j][idx[j]];
            best = std::max(best, corner_score(cols.data(), d, n, corner.data()));
            std::size_t j = 0;
            while (j < d && ++idx[j] == cand[j].size()) idx[j++] = 0;
            if (j == d) break;
        }
        return {best, false};
    }

    // Approximate mode: every one-dimensional projection corner (the other
    // coordinates pinned at 1), then a seeded random sample of grid corners.
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(corner.begin(), corner.end(), 1.0);
        for (double v : cand[j]) {
            corner[j] = v;
            best = std::max(best, corner_score(cols.data(), d, n, corner.data()));
        }
    }
    constexpr std::size_t kSampledCorners = 20000;
    Rng rng(derive_seed(seed, 0xd15cu));
    for (std::size_t t = 0; t < kSampledCorners; ++t) {
        for (std::size_t j = 0; j < d; ++j)
            corner[j] = cand[j][rng.uniform_int(cand[j].size())];
        best = std::max(best, corner_score(cols.data(), d, n, corner.data()));
    }
    return {best, true};
}

}  // namespace sfs
