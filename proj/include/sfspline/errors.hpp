#pragma once

#include <stdexcept>
#include <string>

namespace sfs {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input data is malformed (non-finite values, bad CSV, dimension mismatch).
class invalid_input : public error {
public:
    using error::error;
};

/// A requested configuration exceeds what this build supports
/// (e.g. Sobol dimension above the bundled direction-number table).
class capability_error : public error {
public:
    using error::error;
};

/// An exact computation would exceed its enumeration budget.
class budget_error : public error {
public:
    using error::error;
};

/// A linear system stayed numerically singular after jitter escalation.
class conditioning_error : public error {
public:
    conditioning_error(const std::string& msg, double smallest_pivot)
        : error(msg), smallest_pivot(smallest_pivot) {}
    double smallest_pivot;
};

/// The smoother consumed every degree of freedom (tr(I - A) <= 0), so the
/// GCV denominator is meaningless.
class dof_error : public error {
public:
    using error::error;
};

/// File-format problems, reported with a line number where known.
class io_error : public error {
public:
    using error::error;
};

}  // namespace sfs
