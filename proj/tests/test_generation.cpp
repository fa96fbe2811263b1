#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "firedes/generation.hpp"

using namespace firedes;

TEST(Perceptron, SeparableTwoPointsConverge) {
    const Dataset d("two", 2, {0, 0, 1, 1}, {0, 1});
    TrainingReport rep;
    const auto clf = train_perceptron(d, {}, &rep);
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(predict(clf, d.row(0)), 0);
    EXPECT_EQ(predict(clf, d.row(1)), 1);
}

TEST(Perceptron, XorStopsAtCapWithFiniteWeights) {
    const Dataset d("xor", 2, {0, 0, 1, 1, 0, 1, 1, 0}, {0, 0, 1, 1});
    TrainingReport rep;
    const auto clf = train_perceptron(d, {1.0, 25, 3}, &rep);
    EXPECT_FALSE(rep.converged);
    EXPECT_EQ(rep.epochs, 25u);
    for (double w : clf.weights) EXPECT_TRUE(std::isfinite(w));
    EXPECT_TRUE(std::isfinite(clf.bias));
}

TEST(Perceptron, SeparableGaussianBlobsFitPerfectly) {
    std::mt19937_64 g(11);
    std::normal_distribution<double> n(0.0, 0.05);
    std::vector<double> x;
    std::vector<Label> y;
    for (int i = 0; i < 50; ++i) {
        const Label c = i % 2;
        x.push_back((c ? 0.8 : 0.2) + n(g));
        x.push_back((c ? 0.8 : 0.2) + n(g));
        y.push_back(c);
    }
    const Dataset d("blobs", 2, x, y);
    TrainingReport rep;
    const auto clf = train_perceptron(d, {1.0, 1000, 5}, &rep);
    EXPECT_TRUE(rep.converged);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(predict(clf, d.row(i)), d.label(i));
}

TEST(Perceptron, MarginPredictAndProba) {
    const Perceptron clf{{1.0, 0.0}, 0.0, 0};
    const std::vector<double> x{0.5, 0.9};
    EXPECT_DOUBLE_EQ(margin(clf, x), 0.5);
    EXPECT_EQ(predict(clf, x), 1);

    const std::vector<double> on_boundary{0.0, 0.3};
    EXPECT_EQ(predict(clf, on_boundary), 1);
    EXPECT_DOUBLE_EQ(proba(clf, on_boundary), 0.5);

    const std::vector<double> bad{1.0};
    EXPECT_THROW(margin(clf, bad), contract_error);
}

TEST(Perceptron, ProbaSymmetricAndScaleInvariant) {
    const Perceptron a{{2.0, -1.0}, 0.3, 0};
    const Perceptron scaled{{20.0, -10.0}, 3.0, 0};
    const Perceptron flipped{{-2.0, 1.0}, -0.3, 0};
    for (double u : {-1.0, -0.2, 0.0, 0.4, 1.5}) {
        const std::vector<double> x{u, 0.5 - u};
        EXPECT_NEAR(proba(a, x) + proba(flipped, x), 1.0, 1e-12);
        EXPECT_NEAR(proba(a, x), proba(scaled, x), 1e-12);
    }
}

TEST(Bootstrap, SizeAndMembership) {
    std::vector<double> x(60);
    std::vector<Label> y(60);
    for (int i = 0; i < 60; ++i) {
        x[static_cast<std::size_t>(i)] = i;
        y[static_cast<std::size_t>(i)] = i < 20 ? 0 : 1;
    }
    const Dataset d("d", 1, x, y);
    const auto idx = bootstrap_indices(d, 9);
    EXPECT_EQ(idx.size(), 60u);
    for (auto i : idx) EXPECT_LT(i, 60u);
    EXPECT_EQ(idx, bootstrap_indices(d, 9));
    EXPECT_NE(idx, bootstrap_indices(d, 10));
}

TEST(Bootstrap, RedrawsUntilMinorityPresent) {
    std::vector<double> x(60);
    std::vector<Label> y(60, 1);
    for (int i = 0; i < 60; ++i) x[static_cast<std::size_t>(i)] = i;
    y[17] = 0;
    const Dataset d("skewed", 1, x, y);
    // A single draw misses the lone minority sample about 36% of the time.
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_TRUE(bootstrap(d, s).has_both_classes());
}

TEST(Bootstrap, SingleClassIsDegenerate) {
    const Dataset d("two", 1, {0.0, 1.0}, {0, 0});
    EXPECT_THROW(bootstrap(d, 1), degenerate_bootstrap);
}

TEST(Pool, SizeIndicesAndDeterminism) {
    std::vector<double> x;
    std::vector<Label> y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(i / 40.0);
        x.push_back(std::fmod(i * 0.37, 1.0));
        y.push_back(i % 3 == 0 ? 0 : 1);
    }
    const Dataset d("d", 2, x, y);
    const auto a = generate_pool(d, 100, 5);
    const auto b = generate_pool(d, 100, 5);
    ASSERT_EQ(a.size(), 100u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].index, i);
        EXPECT_EQ(a[i].weights, b[i].weights);
        EXPECT_EQ(a[i].bias, b[i].bias);
    }
    const auto c = generate_pool(d, 100, 6);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].weights != c[i].weights;
    EXPECT_TRUE(differs);
    EXPECT_THROW(generate_pool(d, 0, 1), contract_error);
}

TEST(Pool, JsonRoundTrip) {
    const Dataset d("d", 2, {0, 0, 1, 1, 0, 1, 1, 0, 0.5, 0.5}, {0, 1, 1, 0, 1});
    const auto pool = generate_pool(d, 7, 3);
    const auto back = pool_from_json(nlohmann::json::parse(to_json(pool).dump()));
    ASSERT_EQ(back.size(), pool.size());
    EXPECT_EQ(back.generation_seed, pool.generation_seed);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        EXPECT_EQ(back[i].weights, pool[i].weights);
        EXPECT_EQ(back[i].bias, pool[i].bias);
    }
    EXPECT_THROW(pool_from_json({{"schema", 2}}), contract_error);
}
