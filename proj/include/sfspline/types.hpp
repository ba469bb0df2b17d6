#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace sfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raw observations: n rows of d predictor coordinates plus a response.
/// Coordinates may have arbitrary marginals; everything must be finite.
struct RawTable {
    Matrix x;  // n x d
    Vector y;  // n

    Index rows() const { return x.rows(); }
    Index dims() const { return x.cols(); }
};

/// Sample after the rank transform: every entry of x lies in (0,1).
struct Dataset {
    Matrix x;  // n x d, entries in (0,1)
    Vector y;  // n

    Index rows() const { return x.rows(); }
    Index dims() const { return x.cols(); }
};

}  // namespace sfs
