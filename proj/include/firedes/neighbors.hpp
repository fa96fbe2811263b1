#ifndef FIREDES_NEIGHBORS_HPP
#define FIREDES_NEIGHBORS_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "firedes/dataset.hpp"

namespace firedes {

struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;

    friend bool operator<(const Neighbor& a, const Neighbor& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    }
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact brute-force k nearest rows of `data` to `query`, ascending by distance
/// with ties to the lower index. Rows rejected by `accept` are skipped; fewer
/// than k results are returned when not enough rows qualify.
template <typename Accept>
std::vector<Neighbor> nearest_rows(const Dataset& data, std::span<const double> query, std::size_t k,
                                   Accept&& accept) {
    std::vector<Neighbor> all;
    all.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!accept(i)) continue;
        all.push_back({i, euclidean_distance(data.row(i), query)});
    }
    const auto take = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
    all.resize(take);
    return all;
}

inline std::vector<Neighbor> nearest_rows(const Dataset& data, std::span<const double> query, std::size_t k) {
    return nearest_rows(data, query, k, [](std::size_t) { return true; });
}

} // namespace firedes

#endif // FIREDES_NEIGHBORS_HPP
