#ifndef FIREDES_FILTERING_HPP
#define FIREDES_FILTERING_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "firedes/dataset.hpp"
#include "firedes/error.hpp"
#include "firedes/neighbors.hpp"

namespace firedes {

/// Relative neighbourhood graph over the rows of a dataset.
struct ProximityGraph {
    std::size_t n_vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j, lexicographic order
    std::vector<std::vector<std::size_t>> adjacency;          // ascending per vertex

    bool connected(std::size_t i, std::size_t j) const {
        const auto& a = adjacency.at(i);
        return std::binary_search(a.begin(), a.end(), j);
    }
};

/// (i, j) is an edge iff no third row k lies strictly inside the lune of the
/// pair: dist(i, j) <= max(dist(i, k), dist(j, k)) for every k other than i, j.
inline ProximityGraph build_proximity_graph(const Dataset& dsel) {
    const std::size_t n = dsel.size();
    if (n < 2) throw contract_error("proximity graph needs at least two samples");

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i * n + j] = dist[j * n + i] = euclidean_distance(dsel.row(i), dsel.row(j));

    ProximityGraph g;
    g.n_vertices = n;
    g.adjacency.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = dist[i * n + j];
            bool edge = true;
            for (std::size_t k = 0; k < n && edge; ++k) {
                if (k == i || k == j) continue;
                edge = dij <= std::max(dist[i * n + k], dist[j * n + k]);
            }
            if (!edge) continue;
            g.edges.emplace_back(i, j);
            g.adjacency[i].push_back(j);
            g.adjacency[j].push_back(i);
        }
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

enum class FilterKind { enn, rng };

inline std::string to_string(FilterKind k) { return k == FilterKind::enn ? "enn" : "rng"; }

inline FilterKind filter_kind_from_string(const std::string& s) {
    if (s == "enn" || s == "ENN") return FilterKind::enn;
    if (s == "rng" || s == "RNG") return FilterKind::rng;
    throw contract_error("unknown filter '" + s + "' (expected enn or rng)");
}

struct FilterResult {
    Dataset data;                      // the filtered validation set
    std::vector<std::size_t> kept;     // indices into the input, ascending
    std::vector<std::size_t> removed;  // indices into the input, ascending
};

namespace detail {

/// Votes of a sample's neighbourhood: how many neighbours share its label.
struct NeighborhoodVote {
    std::size_t agree = 0;
    std::size_t disagree = 0;

    double agreement() const {
        const auto total = agree + disagree;
        return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
    }
};

/// Single-pass edit against the original neighbourhoods. Only majority-class
/// samples outvoted by their neighbourhood are dropped; a tie counts as agreement.
inline FilterResult apply_edit(const Dataset& dsel, const std::vector<NeighborhoodVote>& votes) {
    const Label majority = dsel.majority_label();
    std::vector<char> drop(dsel.size(), 0);
    std::size_t majority_kept = 0;
    for (std::size_t i = 0; i < dsel.size(); ++i) {
        if (dsel.label(i) != majority) continue;
        drop[i] = votes[i].disagree > votes[i].agree;
        if (!drop[i]) ++majority_kept;
    }

    // Never strip a class completely: keep the best-supported majority sample.
    if (majority_kept == 0 && dsel.class_count(majority) > 0) {
        std::size_t best = dsel.size();
        for (std::size_t i = 0; i < dsel.size(); ++i) {
            if (dsel.label(i) != majority) continue;
            if (best == dsel.size() || votes[i].agreement() > votes[best].agreement()) best = i;
        }
        drop[best] = 0;
    }

    FilterResult out;
    for (std::size_t i = 0; i < dsel.size(); ++i) (drop[i] ? out.removed : out.kept).push_back(i);
    out.data = dsel.subset(out.kept);
    return out;
}

inline void require_both_classes(const Dataset& dsel, const char* who) {
    if (!dsel.has_both_classes())
        throw contract_error(std::string(who) + ": validation set '" + dsel.name() + "' must contain both classes");
}

} // namespace detail

/// Relative-neighbourhood-graph edition that never removes minority samples.
inline FilterResult rng_filter(const Dataset& dsel) {
    detail::require_both_classes(dsel, "rng_filter");
    const auto graph = build_proximity_graph(dsel);
    std::vector<detail::NeighborhoodVote> votes(dsel.size());
    for (std::size_t i = 0; i < dsel.size(); ++i) {
        for (std::size_t j : graph.adjacency[i]) {
            if (dsel.label(j) == dsel.label(i))
                ++votes[i].agree;
            else
                ++votes[i].disagree;
        }
    }
    return detail::apply_edit(dsel, votes);
}

inline constexpr std::size_t default_enn_k = 3;

/// Edited nearest neighbours restricted to the majority class. Each sample is
/// judged by its k nearest neighbours in the unfiltered set, itself excluded.
inline FilterResult enn_filter(const Dataset& dsel, std::size_t k = default_enn_k) {
    detail::require_both_classes(dsel, "enn_filter");
    if (k == 0) throw contract_error("enn_filter: k must be positive");
    if (dsel.size() < k + 1)
        throw contract_error("enn_filter: need at least k + 1 = " + std::to_string(k + 1) + " samples, got " +
                             std::to_string(dsel.size()));
    std::vector<detail::NeighborhoodVote> votes(dsel.size());
    for (std::size_t i = 0; i < dsel.size(); ++i) {
        const auto nn = nearest_rows(dsel, dsel.row(i), k, [i](std::size_t j) { return j != i; });
        for (const auto& n : nn) {
            if (dsel.label(n.index) == dsel.label(i))
                ++votes[i].agree;
            else
                ++votes[i].disagree;
        }
    }
    return detail::apply_edit(dsel, votes);
}

inline FilterResult apply_filter(const Dataset& dsel, FilterKind kind, std::size_t enn_k = default_enn_k) {
    return kind == FilterKind::enn ? enn_filter(dsel, enn_k) : rng_filter(dsel);
}

} // namespace firedes

#endif // FIREDES_FILTERING_HPP
