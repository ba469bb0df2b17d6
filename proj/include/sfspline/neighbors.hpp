#pragma once

#include <vector>

#include "sfspline/types.hpp"

namespace sfs {

/// Static k-d tree over the rows of an n x d point matrix.
///
/// Construction splits each node at the median of the widest-spread
/// coordinate (ties in the coordinate broken by row index, so the build is
/// deterministic); ranges of at most `leaf_size` points become leaves.
/// Queries return the row index of the nearest point in Euclidean distance,
/// with exact ties resolved to the smallest row index. The tree is immutable
/// after construction, so concurrent queries are safe.
class KdTree {
public:
    explicit KdTree(const Matrix& x, Index leaf_size = 16);

    /// Nearest row to `query` (length dims()). With eps > 0 the search may
    /// prune branches that cannot beat the current best by more than a
    /// (1+eps) distance factor, returning an eps-approximate neighbor.
    Index nearest(const double* query, double eps = 0.0) const;
    Index nearest(const Vector& query, double eps = 0.0) const;

    Index size() const { return pts_.rows(); }
    Index dims() const { return pts_.cols(); }

private:
    struct Node {
        Index begin, end;    // range in idx_
        Index left, right;   // child node ids, -1 for leaves
        Index split_dim;
        double split_val;
    };

    Index build(Index begin, Index end);
    void search(Index node, const double* query, double prune_factor,
                double& best_d2, Index& best_idx) const;

    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> pts_;
    std::vector<Index> idx_;
    std::vector<Node> nodes_;
    Index leaf_size_;
};

/// Row index of the nearest sample point for each design point (one entry
/// per design row, duplicates possible). Deduplication happens in the
/// selection module.
std::vector<Index> select_nearest(const KdTree& tree, const Matrix& design_points);

}  // namespace sfs
