#pragma once

#include <vector>

#include "sfspline/types.hpp"

namespace sfs {

/// Maps raw predictors to (0,1)^d by the per-column empirical rank transform:
/// coordinate j of row i becomes (rank_ij - 0.5)/n, where rank_ij is the rank
/// of x_ij within column j. Ties are broken by original row order, so the
/// result is deterministic and order-preserving per column.
///
/// Rejects non-finite input with the offending row/column and empty tables.
Dataset to_unit_cube(const RawTable& raw);

/// Monotone map from raw coordinates to the unit cube, consistent with
/// to_unit_cube on the training sample (exactly so for columns without
/// ties; tied rows collapse to one position). New values are placed by linear
/// interpolation between consecutive sorted training values (piecewise-linear
/// empirical CDF); values outside the observed range clamp to the extreme
/// transformed positions 0.5/n and (n-0.5)/n.
class EcdfMap {
public:
    explicit EcdfMap(const Matrix& raw_x);

    double map_coord(Index dim, double value) const;
    Matrix map_points(const Matrix& raw_points) const;

    Index dims() const { return static_cast<Index>(sorted_.size()); }

private:
    std::vector<std::vector<double>> sorted_;  // per-column ascending raw values
};

}  // namespace sfs
