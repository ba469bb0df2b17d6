#pragma once

#include <string>

#include "sfspline/solver.hpp"

namespace sfs {

/// Saves a fitted model as a versioned, self-describing JSON record
/// (format "sfspline-model", version 1): kernel spec, basis locations,
/// coefficients, lambda and fit diagnostics. Numbers are written with
/// round-trip precision, so load_model(save_model(m)) == m exactly.
void save_model(const std::string& path, const FittedSpline& model);

/// Loads and validates a model record; raises io_error on unreadable files,
/// malformed JSON, unknown format/version, or inconsistent shapes.
FittedSpline load_model(const std::string& path);

}  // namespace sfs
