#include "sfspline/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sfspline/errors.hpp"
#include "sfspline/neighbors.hpp"
#include "sfspline/rng.hpp"

namespace sfs {

namespace {

const char* skip_number(const char* p, const char* end, double& out) {
    const auto res = std::from_chars(p, end, out);
    return res.ec == std::errc{} ? res.ptr : nullptr;
}

[[noreturn]] void bad_rule(const std::string& text) {
    throw invalid_input("could not parse q-rule '" + text +
                        "' (expected forms: 33, n, n^0.25, 5*n^(2/9))");
}

void check_qn(Index q, Index n, const char* who) {
    if (q < 1) throw invalid_input(std::string(who) + ": q must be >= 1");
    if (q > n)
        throw invalid_input(std::string(who) + ": q = " + std::to_string(q) +
                            " exceeds n = " + std::to_string(n));
}

// First `q` entries of a partial Fisher-Yates shuffle of `pool`.
void draw_without_replacement(std::vector<Index>& pool, Index q, Rng& rng) {
    const auto n = static_cast<Index>(pool.size());
    for (Index i = 0; i < q; ++i) {
        const auto k =
            i + static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(k)]);
    }
    pool.resize(static_cast<std::size_t>(q));
}

// Distinct RNG streams per selection method so draws never alias.
constexpr std::uint64_t kUniformStream = 1;
constexpr std::uint64_t kAdaptiveStream = 2;
constexpr std::uint64_t kTopUpStream = 1000;

}  // namespace

QRule parse_q_rule(const std::string& text) {
    std::string s = text;
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    if (s.empty()) bad_rule(text);
    const char* p = s.data();
    const char* end = s.data() + s.size();

    double coef = 1.0;
    if (*p != 'n') {
        p = skip_number(p, end, coef);
        if (p == nullptr) bad_rule(text);
        if (p == end) {
            // Plain number: constant q for every n.
            if (!(coef > 0.0) || !std::isfinite(coef)) bad_rule(text);
            return {coef, 0.0, text};
        }
        if (*p != '*') bad_rule(text);
        ++p;
    }
    if (p == end || *p != 'n') bad_rule(text);
    ++p;

    double expo = 1.0;
    if (p != end) {
        if (*p != '^') bad_rule(text);
        ++p;
        if (p != end && *p == '(') {
            double num = 0.0, den = 0.0;
            p = skip_number(p + 1, end, num);
            if (p == nullptr || p == end || *p != '/') bad_rule(text);
            p = skip_number(p + 1, end, den);
            if (p == nullptr || p == end || *p != ')') bad_rule(text);
            ++p;
            if (den == 0.0) bad_rule(text);
            expo = num / den;
        } else {
            p = skip_number(p, end, expo);
            if (p == nullptr) bad_rule(text);
        }
        if (p != end) bad_rule(text);
    }

    if (!(coef > 0.0) || !std::isfinite(coef)) bad_rule(text);
    if (!(expo >= 0.0 && expo <= 1.0)) bad_rule(text);
    return {coef, expo, text};
}

Index essential_q(const QRule& rule, Index n) {
    if (n < 1) throw invalid_input("essential_q: n must be >= 1");
    const double q = rule.coefficient *
                     std::pow(static_cast<double>(n), rule.exponent);
    return std::max<Index>(1, static_cast<Index>(std::llround(q)));
}

std::string to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::uniform: return "unif";
        case SelectionMethod::adaptive: return "abs";
        case SelectionMethod::space_filling: return "sbs";
    }
    return "?";
}

SelectionMethod selection_method_from_string(const std::string& name) {
    if (name == "unif" || name == "uniform") return SelectionMethod::uniform;
    if (name == "abs" || name == "adaptive") return SelectionMethod::adaptive;
    if (name == "sbs" || name == "space-filling")
        return SelectionMethod::space_filling;
    throw invalid_input("unknown selection method '" + name +
                        "' (expected sbs, abs, or unif)");
}

BasisSelection select_uniform(const Dataset& data, Index q, std::uint64_t seed) {
    check_qn(q, data.rows(), "select_uniform");
    std::vector<Index> pool(static_cast<std::size_t>(data.rows()));
    std::iota(pool.begin(), pool.end(), Index{0});
    Rng rng(derive_seed(seed, kUniformStream));
    draw_without_replacement(pool, q, rng);
    std::sort(pool.begin(), pool.end());
    return {std::move(pool), SelectionMethod::uniform, seed, q};
}

bool redistribute_quotas(const std::vector<Index>& slice_sizes, Index q,
                         std::vector<Index>& quotas) {
    const auto K = static_cast<Index>(slice_sizes.size());
    if (K < 1) throw invalid_input("quotas: need at least one slice");
    const Index total = std::accumulate(slice_sizes.begin(), slice_sizes.end(), Index{0});
    if (q > total)
        throw invalid_input("quotas: q = " + std::to_string(q) +
                            " exceeds total slice capacity " + std::to_string(total));

    quotas.assign(static_cast<std::size_t>(K), q / K);
    for (Index g = 0; g < q % K; ++g) ++quotas[static_cast<std::size_t>(g)];

    bool changed = false;
    for (Index g = 0; g < K; ++g) {
        auto& qg = quotas[static_cast<std::size_t>(g)];
        if (qg <= slice_sizes[static_cast<std::size_t>(g)]) continue;
        Index overflow = qg - slice_sizes[static_cast<std::size_t>(g)];
        qg = slice_sizes[static_cast<std::size_t>(g)];
        changed = true;
        for (Index offset = 1; offset < K && overflow > 0; ++offset) {
            for (const Index t : {g + offset, g - offset}) {
                if (t < 0 || t >= K || overflow == 0) continue;
                const Index room = std::max<Index>(
                    0, slice_sizes[static_cast<std::size_t>(t)] -
                           quotas[static_cast<std::size_t>(t)]);
                const Index add = std::min(room, overflow);
                quotas[static_cast<std::size_t>(t)] += add;
                overflow -= add;
            }
        }
    }
    return changed;
}

BasisSelection select_adaptive(const Dataset& data, Index q, Index slices,
                               std::uint64_t seed, std::string* warning) {
    const Index n = data.rows();
    check_qn(q, n, "select_adaptive");
    if (slices < 1 || slices > q)
        throw invalid_input("select_adaptive: slices must be in [1, q]");

    // Rows ordered by response; ties keep row order so slicing is stable.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return data.y(a) < data.y(b) || (data.y(a) == data.y(b) && a < b);
    });

    std::vector<Index> sizes(static_cast<std::size_t>(slices));
    for (Index g = 0; g < slices; ++g)
        sizes[static_cast<std::size_t>(g)] = n / slices + (g < n % slices ? 1 : 0);
    std::vector<Index> quotas;
    if (redistribute_quotas(sizes, q, quotas) && warning != nullptr)
        *warning += "adaptive selection: a slice was smaller than its quota; "
                    "the excess went to neighboring slices";

    BasisSelection sel{{}, SelectionMethod::adaptive, seed, q};
    sel.indices.reserve(static_cast<std::size_t>(q));
    Rng rng(derive_seed(seed, kAdaptiveStream));
    std::size_t start = 0;
    for (Index g = 0; g < slices; ++g) {
        const auto size = static_cast<std::size_t>(sizes[static_cast<std::size_t>(g)]);
        std::vector<Index> slice(order.begin() + static_cast<std::ptrdiff_t>(start),
                                 order.begin() + static_cast<std::ptrdiff_t>(start + size));
        draw_without_replacement(slice, quotas[static_cast<std::size_t>(g)], rng);
        sel.indices.insert(sel.indices.end(), slice.begin(), slice.end());
        start += size;
    }
    std::sort(sel.indices.begin(), sel.indices.end());
    return sel;
}

BasisSelection select_space_filling(const Dataset& data, Index q,
                                    DesignMethod method, std::uint64_t seed) {
    const Index n = data.rows();
    const Index d = data.dims();
    check_qn(q, n, "select_space_filling");

    BasisSelection sel{{}, SelectionMethod::space_filling, seed, q};
    sel.indices.reserve(static_cast<std::size_t>(q));
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    std::uint64_t sobol_start = 0;
    constexpr int kMaxRounds = 5;

    for (int round = 0; round < kMaxRounds && sel.q_eff() < q; ++round) {
        const Index need = q - sel.q_eff();
        const Index remaining = n - sel.q_eff();
        if (need == remaining) {
            // Every unmatched row is required; matching is a formality.
            for (Index i = 0; i < n; ++i)
                if (!chosen[static_cast<std::size_t>(i)]) sel.indices.push_back(i);
            break;
        }

        Matrix batch;
        switch (method) {
            case DesignMethod::sobol:
                batch = sobol_points(need, d, sobol_start);
                sobol_start += static_cast<std::uint64_t>(need);
                break;
            case DesignMethod::lhs:
                batch = generate_design(DesignMethod::lhs, need, d,
                                        round == 0 ? seed
                                                   : derive_seed(seed, kTopUpStream +
                                                                           static_cast<std::uint64_t>(round)))
                            .points;
                break;
            case DesignMethod::centered_grid:
                batch = generate_design(DesignMethod::centered_grid, need, d, seed).points;
                break;
        }

        // Match only against rows not selected yet, so each round makes
        // progress and no round-level deduplication against the past is
        // needed.
        Matrix sub(remaining, d);
        std::vector<Index> rows(static_cast<std::size_t>(remaining));
        Index r = 0;
        for (Index i = 0; i < n; ++i) {
            if (chosen[static_cast<std::size_t>(i)]) continue;
            sub.row(r) = data.x.row(i);
            rows[static_cast<std::size_t>(r)] = i;
            ++r;
        }
        const KdTree tree(sub);
        for (const Index hit : select_nearest(tree, batch)) {
            const Index row = rows[static_cast<std::size_t>(hit)];
            if (!chosen[static_cast<std::size_t>(row)]) {
                chosen[static_cast<std::size_t>(row)] = 1;
                sel.indices.push_back(row);
            }
        }
    }
    return sel;
}

BasisSelection select_basis(const Dataset& data, SelectionMethod method,
                            Index q, std::uint64_t seed) {
    switch (method) {
        case SelectionMethod::uniform:
            return select_uniform(data, q, seed);
        case SelectionMethod::adaptive:
            return select_adaptive(data, q, kDefaultAdaptiveSlices, seed);
        case SelectionMethod::space_filling:
            return select_space_filling(data, q, DesignMethod::sobol, seed);
    }
    throw invalid_input("unknown selection method");
}

}  // namespace sfs
