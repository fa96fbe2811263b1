#ifndef FIREDES_PRUNING_HPP
#define FIREDES_PRUNING_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "firedes/evaluation.hpp"
#include "firedes/region.hpp"

namespace firedes {

/// Cross-class pairs of region members, as positions (a < b) into the region.
struct FrienemySet {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
    bool empty() const noexcept { return pairs.empty(); }
};

inline FrienemySet frienemy_pairs(std::span<const Label> member_labels) {
    FrienemySet f;
    for (std::size_t a = 0; a < member_labels.size(); ++a)
        for (std::size_t b = a + 1; b < member_labels.size(); ++b)
            if (member_labels[a] != member_labels[b]) f.pairs.emplace_back(a, b);
    return f;
}

inline FrienemySet frienemy_pairs(const RegionOfCompetence& roc) {
    std::vector<Label> labels;
    for (const auto& m : roc.members) labels.push_back(m.label);
    return frienemy_pairs(labels);
}

struct PrunedPool {
    std::vector<std::size_t> selected;  // pool indices, ascending
    bool fallback_used = false;
};

namespace detail {

/// Positions (into ev) of the classifiers that cover at least one frienemy pair.
inline std::vector<std::size_t> frienemy_covering_positions(const RegionEvaluation& ev) {
    const auto pairs = frienemy_pairs(ev.member_labels).pairs;
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        for (const auto& [a, b] : pairs) {
            if (ev.correct(c, a) && ev.correct(c, b)) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

} // namespace detail

/// Dynamic frienemy pruning. Keeps the classifiers whose decision boundary
/// crosses the region, i.e. that get both members of some cross-class pair
/// right. A single-class region has no pairs, so the whole pool is kept.
inline PrunedPool dfp_prune(const RegionEvaluation& ev) {
    PrunedPool out;
    for (std::size_t c : detail::frienemy_covering_positions(ev)) out.selected.push_back(ev.pool_indices[c]);
    if (out.selected.empty()) {
        out.selected = ev.pool_indices;
        out.fallback_used = true;
    }
    return out;
}

inline PrunedPool dfp_prune(const RegionOfCompetence& roc, const ClassifierPool& pool) {
    if (pool.empty()) throw contract_error("dfp_prune: empty pool");
    return dfp_prune(evaluate_region(pool, roc));
}

} // namespace firedes

#endif // FIREDES_PRUNING_HPP
