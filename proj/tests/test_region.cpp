#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "firedes/filtering.hpp"
#include "firedes/region.hpp"

#include "support/toy.hpp"

using namespace firedes;

namespace {

std::vector<std::size_t> indices_of(const RegionOfCompetence& roc) {
    std::vector<std::size_t> v;
    for (const auto& m : roc.members) v.push_back(m.index);
    return v;
}

// Stable sort of every row by distance; ties keep the lower index first.
std::vector<std::size_t> sorted_by_distance(const Dataset& d, std::span<const double> q) {
    std::vector<std::size_t> idx(d.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return squared_distance(d.row(a), q) < squared_distance(d.row(b), q);
    });
    return idx;
}

} // namespace

TEST(KnnRegion, OneDimensionalExample) {
    const Dataset d("d", 1, {0.0, 0.2, 0.9}, {0, 1, 1});
    const std::vector<double> q{0.1};
    const auto roc = knn_region(d, q, 2);
    EXPECT_EQ(indices_of(roc), (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(roc.members[0].distance, 0.1, 1e-12);
}

TEST(KnnRegion, KEqualToSizeTakesEverything) {
    const Dataset d("d", 1, {0.0, 0.2, 0.9, 0.5}, {0, 1, 1, 0});
    const std::vector<double> q{0.6};
    const auto roc = knn_region(d, q, 4);
    EXPECT_EQ(indices_of(roc), (std::vector<std::size_t>{3, 2, 1, 0}));
    EXPECT_THROW(knn_region(d, q, 5), insufficient_data);
    EXPECT_THROW(knn_region(d, q, 0), contract_error);
    const std::vector<double> bad{0.1, 0.2};
    EXPECT_THROW(knn_region(d, bad, 1), contract_error);
}

TEST(KnnRegion, MatchesFullSortOnRandomSets) {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> x(100);
        std::vector<Label> y(50);
        for (auto& v : x) v = std::round(u(g) * 20.0) / 20.0;  // coarse grid forces distance ties
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<Label>(i % 3 == 0);
        const Dataset d("r", 2, x, y);
        const std::vector<double> q{u(g), u(g)};
        auto want = sorted_by_distance(d, q);
        want.resize(7);
        EXPECT_EQ(indices_of(knn_region(d, q, 7)), want) << "set " << rep;
    }
}

TEST(KnnRegion, GrowingKAppendsOneMember) {
    const Dataset d("d", 2, {0.1, 0.2, 0.4, 0.4, 0.7, 0.1, 0.3, 0.9, 0.5, 0.5, 0.8, 0.8}, {0, 1, 0, 1, 0, 1});
    const std::vector<double> q{0.45, 0.45};
    for (std::size_t k = 1; k < d.size(); ++k) {
        auto small = indices_of(knn_region(d, q, k));
        const auto big = indices_of(knn_region(d, q, k + 1));
        ASSERT_EQ(big.size(), k + 1);
        EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
    }
}

TEST(KnneRegion, EqualSharePerClass) {
    const Dataset d("d", 1, {0.0, 0.1, 0.2, 0.3, 0.6, 0.7, 0.8, 0.9}, {0, 0, 0, 0, 1, 1, 1, 1});
    const std::vector<double> q{0.05};
    const auto roc = knne_region(d, q, 3);
    ASSERT_EQ(roc.size(), 6u);
    EXPECT_EQ(roc.count(0), 3u);
    EXPECT_EQ(roc.count(1), 3u);
    EXPECT_FALSE(roc.has_shortfall());
    EXPECT_TRUE(roc.class_balanced);
    for (std::size_t j = 1; j < roc.size(); ++j) EXPECT_LE(roc.members[j - 1].distance, roc.members[j].distance);
}

TEST(KnneRegion, ShortClassContributesAll) {
    const Dataset d("d", 1, {0.0, 0.1, 0.6, 0.7, 0.8, 0.9}, {0, 0, 1, 1, 1, 1});
    const std::vector<double> q{0.5};
    const auto roc = knne_region(d, q, 3);
    EXPECT_EQ(roc.size(), 5u);
    EXPECT_EQ(roc.shortfall[0], 1u);
    EXPECT_EQ(roc.shortfall[1], 0u);
    EXPECT_TRUE(roc.has_shortfall());
}

TEST(KnneRegion, SingleClassIsContractError) {
    const Dataset d("d", 1, {0.0, 0.1, 0.2}, {1, 1, 1});
    const std::vector<double> q{0.5};
    EXPECT_THROW(knne_region(d, q, 1), contract_error);
}

TEST(KnneRegion, ToyQueryAfterFilteringHasTwoPerClass) {
    const auto filtered = enn_filter(toy::points()).data;
    const auto roc = knne_region(filtered, toy::query, 2);
    ASSERT_EQ(roc.size(), 4u);
    // Rows of the filtered set are A, B, C, D, E, F, G, H.
    std::vector<std::size_t> got = indices_of(roc);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::size_t>{0, 1, 4, 5}));
    EXPECT_EQ(roc.count(0), 2u);
    EXPECT_EQ(roc.count(1), 2u);
}

TEST(KnnRegion, ToyQueryWithoutFilteringHoldsPlantedSquare) {
    const auto roc = knn_region(toy::points(), toy::query, 4);
    std::vector<std::size_t> got = indices_of(roc);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::size_t>{toy::A, toy::B, toy::C, toy::N}));
}
