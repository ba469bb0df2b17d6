#include "sfspline/neighbors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sfspline/errors.hpp"

namespace sfs {

KdTree::KdTree(const Matrix& x, Index leaf_size)
    : pts_(x), idx_(static_cast<std::size_t>(x.rows())), leaf_size_(leaf_size) {
    if (x.rows() < 1) throw invalid_input("kd-tree: empty point set");
    if (x.cols() < 1) throw invalid_input("kd-tree: points need at least one coordinate");
    if (leaf_size_ < 1) leaf_size_ = 1;
    std::iota(idx_.begin(), idx_.end(), Index{0});
    nodes_.reserve(static_cast<std::size_t>(2 * (x.rows() / leaf_size_ + 1)));
    build(0, x.rows());
}

Index KdTree::build(Index begin, Index end) {
    const Index id = static_cast<Index>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1, 0, 0.0});
    if (end - begin <= leaf_size_) return id;

    // Split on the coordinate with the widest spread inside this node.
    Index dim = 0;
    double best_spread = -1.0;
    for (Index j = 0; j < pts_.cols(); ++j) {
        double lo = pts_(idx_[static_cast<std::size_t>(begin)], j);
        double hi = lo;
        for (Index t = begin + 1; t < end; ++t) {
            const double v = pts_(idx_[static_cast<std::size_t>(t)], j);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            dim = j;
        }
    }

    const Index mid = begin + (end - begin) / 2;
    // (coordinate, row index) is a total order, so the partition and hence
    // the whole tree layout are deterministic.
    std::nth_element(idx_.begin() + begin, idx_.begin() + mid, idx_.begin() + end,
                     [&](Index a, Index b) {
                         const double va = pts_(a, dim), vb = pts_(b, dim);
                         return va < vb || (va == vb && a < b);
                     });

    nodes_[static_cast<std::size_t>(id)].split_dim = dim;
    nodes_[static_cast<std::size_t>(id)].split_val =
        pts_(idx_[static_cast<std::size_t>(mid)], dim);
    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
}

void KdTree::search(Index node, const double* query, double prune_factor,
                    double& best_d2, Index& best_idx) const {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (nd.left < 0) {
        const Index d = pts_.cols();
        for (Index t = nd.begin; t < nd.end; ++t) {
            const Index row = idx_[static_cast<std::size_t>(t)];
            double d2 = 0.0;
            const double* p = pts_.data() + row * d;
            for (Index j = 0; j < d; ++j) {
                const double diff = p[j] - query[j];
                d2 += diff * diff;
            }
            if (d2 < best_d2 || (d2 == best_d2 && row < best_idx)) {
                best_d2 = d2;
                best_idx = row;
            }
        }
        return;
    }

    const double diff = query[nd.split_dim] - nd.split_val;
    const Index near = diff < 0.0 ? nd.left : nd.right;
    const Index far = diff < 0.0 ? nd.right : nd.left;
    search(near, query, prune_factor, best_d2, best_idx);
    // The far child is visited whenever the splitting plane is close enough
    // that it could still hold the winner (or an equal-distance point with a
    // smaller row index, hence <=).
    if (diff * diff * prune_factor <= best_d2)
        search(far, query, prune_factor, best_d2, best_idx);
}

Index KdTree::nearest(const double* query, double eps) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    Index best_idx = size();
    const double prune_factor = (1.0 + eps) * (1.0 + eps);
    search(0, query, prune_factor, best_d2, best_idx);
    return best_idx;
}

Index KdTree::nearest(const Vector& query, double eps) const {
    if (query.size() != dims())
        throw invalid_input("kd-tree: query dimension mismatch");
    return nearest(query.data(), eps);
}

std::vector<Index> select_nearest(const KdTree& tree, const Matrix& design_points) {
    if (design_points.cols() != tree.dims())
        throw invalid_input("select_nearest: design dimension mismatch");
    std::vector<Index> out(static_cast<std::size_t>(design_points.rows()));
    std::vector<double> q(static_cast<std::size_t>(design_points.cols()));
    for (Index i = 0; i < design_points.rows(); ++i) {
        for (Index j = 0; j < design_points.cols(); ++j)
            q[static_cast<std::size_t>(j)] = design_points(i, j);
        out[static_cast<std::size_t>(i)] = tree.nearest(q.data());
    }
    return out;
}

}  // namespace sfs
