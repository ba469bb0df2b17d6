#include "sfspline/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sfspline/errors.hpp"

namespace sfs {

Dataset to_unit_cube(const RawTable& raw) {
    const Index n = raw.rows();
    const Index d = raw.dims();
    if (n < 1) throw invalid_input("empty input table");
    if (d < 1) throw invalid_input("no predictor columns");
    if (raw.y.size() != n) throw invalid_input("response length mismatch");

    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(raw.y(i)))
            throw invalid_input("non-finite response at row " + std::to_string(i));
        for (Index j = 0; j < d; ++j)
            if (!std::isfinite(raw.x(i, j)))
                throw invalid_input("non-finite value at row " + std::to_string(i) +
                                    ", column " + std::to_string(j));
    }

    Dataset out;
    out.x.resize(n, d);
    out.y = raw.y;

    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index j = 0; j < d; ++j) {
        std::iota(order.begin(), order.end(), Index{0});
        // stable: equal values keep original row order, giving distinct ranks
        std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
            return raw.x(a, j) < raw.x(b, j);
        });
        for (Index r = 0; r < n; ++r)
            out.x(order[static_cast<std::size_t>(r)], j) =
                (static_cast<double>(r) + 0.5) / static_cast<double>(n);
    }
    return out;
}

EcdfMap::EcdfMap(const Matrix& raw_x) {
    sorted_.resize(static_cast<std::size_t>(raw_x.cols()));
    for (Index j = 0; j < raw_x.cols(); ++j) {
        auto& col = sorted_[static_cast<std::size_t>(j)];
        col.resize(static_cast<std::size_t>(raw_x.rows()));
        for (Index i = 0; i < raw_x.rows(); ++i)
            col[static_cast<std::size_t>(i)] = raw_x(i, j);
        std::sort(col.begin(), col.end());
    }
}

double EcdfMap::map_coord(Index dim, double value) const {
    const auto& col = sorted_[static_cast<std::size_t>(dim)];
    const double n = static_cast<double>(col.size());
    if (value <= col.front()) return 0.5 / n;
    if (value >= col.back()) return (n - 0.5) / n;
    // first k with col[k] > value; value sits in [col[k-1], col[k])
    const auto it = std::upper_bound(col.begin(), col.end(), value);
    const std::size_t k = static_cast<std::size_t>(it - col.begin());
    const double lo = col[k - 1], hi = col[k];
    const double frac = hi > lo ? (value - lo) / (hi - lo) : 0.0;
    return (static_cast<double>(k) - 0.5 + frac) / n;
}

Matrix EcdfMap::map_points(const Matrix& raw_points) const {
    if (raw_points.cols() != dims())
        throw invalid_input("point dimension does not match the fitted map");
    Matrix out(raw_points.rows(), raw_points.cols());
    for (Index j = 0; j < raw_points.cols(); ++j)
        for (Index i = 0; i < raw_points.rows(); ++i)
            out(i, j) = map_coord(j, raw_points(i, j));
    return out;
}

}  // namespace sfs
