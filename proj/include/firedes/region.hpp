#ifndef FIREDES_REGION_HPP
#define FIREDES_REGION_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "firedes/dataset.hpp"
#include "firedes/error.hpp"
#include "firedes/neighbors.hpp"

namespace firedes {

struct RegionMember {
    std::size_t index = 0;  // row in the validation set the region was drawn from
    Label label = 0;
    double distance = 0.0;
};

/// Neighbourhood of one query in the (filtered) validation set.
///
/// Members are ordered by ascending distance to the query (ties: lower row
/// index), so the last member is always the farthest one.
struct RegionOfCompetence {
    std::vector<RegionMember> members;
    std::vector<double> member_features;  // row-major, aligned with `members`
    std::vector<double> query;
    std::size_t k_requested = 0;
    bool class_balanced = false;  // built per class (KNNE)
    /// Per-class count of requested neighbours that did not exist (KNNE only).
    std::array<std::size_t, num_classes> shortfall{};
    Label minority = 0;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    std::size_t n_features() const noexcept { return query.size(); }

    std::span<const double> row(std::size_t j) const {
        return {member_features.data() + j * n_features(), n_features()};
    }

    std::size_t count(Label y) const {
        return static_cast<std::size_t>(
            std::count_if(members.begin(), members.end(), [y](const RegionMember& m) { return m.label == y; }));
    }

    bool has_shortfall() const noexcept { return shortfall[0] + shortfall[1] > 0; }
};

namespace detail {

inline RegionOfCompetence make_region(const Dataset& dsel, std::span<const double> query,
                                      std::vector<Neighbor> neighbors, std::size_t k, bool balanced) {
    std::sort(neighbors.begin(), neighbors.end());
    RegionOfCompetence roc;
    roc.query.assign(query.begin(), query.end());
    roc.k_requested = k;
    roc.class_balanced = balanced;
    roc.minority = dsel.minority_label();
    roc.members.reserve(neighbors.size());
    roc.member_features.reserve(neighbors.size() * query.size());
    for (const auto& n : neighbors) {
        roc.members.push_back({n.index, dsel.label(n.index), n.distance});
        auto r = dsel.row(n.index);
        roc.member_features.insert(roc.member_features.end(), r.begin(), r.end());
    }
    return roc;
}

inline void check_query(const Dataset& dsel, std::span<const double> query) {
    if (query.size() != dsel.n_features())
        throw contract_error("query has " + std::to_string(query.size()) + " features, validation set has " +
                             std::to_string(dsel.n_features()));
}

} // namespace detail

inline constexpr std::size_t default_region_k = 7;

/// The k nearest validation samples regardless of class.
inline RegionOfCompetence knn_region(const Dataset& dsel, std::span<const double> query,
                                     std::size_t k = default_region_k) {
    detail::check_query(dsel, query);
    if (k == 0) throw contract_error("knn_region: k must be positive");
    if (dsel.size() < k)
        throw insufficient_data("knn_region: " + std::to_string(k) + " neighbours requested from " +
                                std::to_string(dsel.size()) + " samples");
    return detail::make_region(dsel, query, nearest_rows(dsel, query, k), k, false);
}

/// K-nearest neighbours equality: the k nearest samples of each class. A class
/// with fewer than k samples contributes all of them and records the shortfall.
inline RegionOfCompetence knne_region(const Dataset& dsel, std::span<const double> query,
                                      std::size_t k = default_region_k) {
    detail::check_query(dsel, query);
    if (k == 0) throw contract_error("knne_region: k must be positive");
    if (!dsel.has_both_classes())
        throw contract_error("knne_region: validation set '" + dsel.name() + "' must contain both classes");
    std::vector<Neighbor> all;
    std::array<std::size_t, num_classes> shortfall{};
    for (Label y = 0; y < static_cast<Label>(num_classes); ++y) {
        auto nn = nearest_rows(dsel, query, k, [&](std::size_t i) { return dsel.label(i) == y; });
        shortfall[static_cast<std::size_t>(y)] = k - nn.size();
        all.insert(all.end(), nn.begin(), nn.end());
    }
    auto roc = detail::make_region(dsel, query, std::move(all), k, true);
    roc.shortfall = shortfall;
    return roc;
}

} // namespace firedes

#endif // FIREDES_REGION_HPP
