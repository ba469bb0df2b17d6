#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfspline/types.hpp"

namespace sfs {

enum class DesignMethod { sobol, lhs, centered_grid };

std::string to_string(DesignMethod m);
DesignMethod design_method_from_string(const std::string& name);

/// Highest dimension covered by the bundled Sobol direction numbers.
inline constexpr Index kMaxDesignDim = 10;

/// q space-filling points in [0,1)^d with full generation provenance.
/// Regenerating with the same (method, q, d, seed) is bit-identical.
struct DesignPointSet {
    Matrix points;  // q x d
    DesignMethod method;
    std::uint64_t seed;
};

/// Unscrambled Gray-code Sobol points with indices [start, start+q).
/// Point 0 is the origin. d must be within the bundled table (<= 10).
Matrix sobol_points(Index q, Index d, std::uint64_t start = 0);

/// Generates design points.
///   sobol         deterministic low-discrepancy sequence (seed ignored)
///   lhs           seeded Latin hypercube; each coordinate sits at the
///                 midpoint of its stratum, strata paired by random
///                 permutation
///   centered_grid d=1 only: (2i-1)/(2q)
DesignPointSet generate_design(DesignMethod method, Index q, Index d,
                               std::uint64_t seed);

/// |#{x in [0,a)}/q - vol[0,a)| for the anchored half-open box, counting
/// with strict upper-coordinate inequality. Each a_j must lie in [0,1].
double local_discrepancy(const Matrix& points, const std::vector<double>& a);

enum class DiscrepancyMode { exact, approximate };

struct StarDiscrepancy {
    double value;
    bool is_lower_bound;  // true in approximate mode
};

/// Star discrepancy sup_a |#{x in [0,a)}/q - vol|.
///
/// Exact mode enumerates candidate corners on the grid of point coordinates
/// augmented with 1.0, scoring each with both the open-count and the
/// closed-count residual; it refuses instances with q^d * q > 1e8.
/// Approximate mode evaluates the same score over all one-dimensional
/// projection corners plus a seeded random subset of grid corners, and is
/// therefore a lower bound for the exact value.
StarDiscrepancy star_discrepancy(const Matrix& points, DiscrepancyMode mode,
                                 std::uint64_t seed = 0);

}  // namespace sfs
