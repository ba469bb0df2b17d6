#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfspline/design.hpp"
#include "sfspline/types.hpp"

namespace sfs {

/// q as a function of n: round(coefficient * n^exponent), at least 1.
/// The source text is kept for reporting.
struct QRule {
    double coefficient;
    double exponent;
    std::string text;
};

/// Parses "5*n^(2/9)", "10*n^(1/9)", "n^0.25", "n", or a plain number
/// (constant q). Coefficient must be positive, exponent in [0, 1].
QRule parse_q_rule(const std::string& text);

Index essential_q(const QRule& rule, Index n);

enum class SelectionMethod { uniform, adaptive, space_filling };

/// Short names used on the command line and in result tables.
std::string to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& name);

/// Distinct basis-location row indices plus how they were chosen.
struct BasisSelection {
    std::vector<Index> indices;  // distinct, in [0, n)
    SelectionMethod method;
    std::uint64_t seed;
    Index q_requested;

    Index q_eff() const { return static_cast<Index>(indices.size()); }
};

/// Simple random sample of q distinct rows (partial Fisher-Yates over the
/// row ids), returned in ascending order.
BasisSelection select_uniform(const Dataset& data, Index q, std::uint64_t seed);

/// Per-slice quotas for q draws from slices of the given sizes. Slice g
/// starts at floor(q/K) plus one extra for the first q mod K slices; any
/// quota exceeding its slice is pushed to the nearest slices with spare
/// room (right first, then left). Returns true if redistribution happened.
bool redistribute_quotas(const std::vector<Index>& slice_sizes, Index q,
                         std::vector<Index>& quotas);

/// Stratified sample across `slices` response-quantile slices: rows are
/// ordered by (y, row index) and cut into contiguous near-equal groups from
/// the lowest responses to the highest; each slice contributes its quota by
/// a seeded partial Fisher-Yates, slices drawn in ascending order from one
/// stream. Indices are returned in ascending order. If any quota had to be
/// redistributed a warning is appended to *warning.
///
/// The method this baseline stands in for is cited, not specified, by the
/// reproduced protocol; the slice sampler here is a documented
/// reconstruction, defaulting to 5 slices.
BasisSelection select_adaptive(const Dataset& data, Index q, Index slices,
                               std::uint64_t seed,
                               std::string* warning = nullptr);

inline constexpr Index kDefaultAdaptiveSlices = 5;

/// Space-filling selection: generate q design points, match each to its
/// nearest sample row, deduplicate keeping first occurrences. While the
/// selection is short of q, further design points are matched against the
/// not-yet-selected rows only (at most 5 rounds total): Sobol batches
/// continue the sequence where the previous batch stopped, LHS batches are
/// drawn with a per-round derived seed, a centered grid is re-matched as is.
/// When the deficit equals the number of unmatched rows the remainder is
/// taken wholesale (the matching is forced at that point). Indices keep
/// selection order; q_eff may end below q and is visible in the result.
BasisSelection select_space_filling(const Dataset& data, Index q,
                                    DesignMethod method, std::uint64_t seed);

/// Dispatch on the method name: uniform, adaptive with the default slice
/// count, or space-filling driven by a Sobol design.
BasisSelection select_basis(const Dataset& data, SelectionMethod method,
                            Index q, std::uint64_t seed);

}  // namespace sfs
