#ifndef FIREDES_GENERATION_HPP
#define FIREDES_GENERATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "firedes/dataset.hpp"
#include "firedes/error.hpp"
#include "firedes/random.hpp"

namespace firedes {

/// Linear threshold unit. Predicts label 1 when w.x + b >= 0.
struct Perceptron {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t index = 0;

    std::size_t dimension() const noexcept { return weights.size(); }
};

inline double margin(const Perceptron& clf, std::span<const double> x) {
    if (x.size() != clf.weights.size())
        throw contract_error("feature vector has " + std::to_string(x.size()) + " values, classifier expects " +
                             std::to_string(clf.weights.size()));
    double m = clf.bias;
    for (std::size_t j = 0; j < x.size(); ++j) m += clf.weights[j] * x[j];
    return m;
}

inline Label predict(const Perceptron& clf, std::span<const double> x) { return margin(clf, x) >= 0.0 ? 1 : 0; }

inline double weight_norm(const Perceptron& clf) {
    double s = 0.0;
    for (double w : clf.weights) s += w * w;
    return std::sqrt(s);
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Posterior of label 1 given a raw margin. The margin is divided by the weight
/// norm, i.e. it is the signed distance to the hyperplane, so rescaling the
/// weights leaves the probability unchanged.
inline double proba_from_margin(double m, double norm) { return logistic(m / std::max(norm, 1e-12)); }

inline double proba(const Perceptron& clf, std::span<const double> x) {
    return proba_from_margin(margin(clf, x), weight_norm(clf));
}

struct PerceptronConfig {
    double learning_rate = 1.0;
    std::size_t max_epochs = 100;
    std::uint64_t seed = 0;
};

struct TrainingReport {
    bool converged = false;
    std::size_t epochs = 0;
};

/// Rosenblatt training from zero weights with a seeded per-epoch shuffle. Stops
/// after an epoch without updates or at `max_epochs`.
inline Perceptron train_perceptron(const Dataset& sample, const PerceptronConfig& config = {},
                                   TrainingReport* report = nullptr) {
    if (sample.empty()) throw contract_error("cannot train on an empty sample");
    Perceptron clf;
    clf.weights.assign(sample.n_features(), 0.0);

    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng gen(config.seed);

    TrainingReport local;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        gen.shuffle(std::span<std::size_t>(order));
        std::size_t updates = 0;
        for (std::size_t i : order) {
            const auto x = sample.row(i);
            const Label y = sample.label(i);
            if (predict(clf, x) == y) continue;
            const double step = config.learning_rate * (y == 1 ? 1.0 : -1.0);
            for (std::size_t j = 0; j < x.size(); ++j) clf.weights[j] += step * x[j];
            clf.bias += step;
            ++updates;
        }
        local.epochs = epoch + 1;
        if (updates == 0) {
            local.converged = true;
            break;
        }
    }
    if (report) *report = local;
    return clf;
}

inline constexpr std::size_t max_bootstrap_redraws = 100;

/// Row indices of a bootstrap sample that contains both classes.
inline std::vector<std::size_t> bootstrap_indices(const Dataset& train, std::uint64_t seed) {
    if (train.empty()) throw contract_error("cannot bootstrap an empty set");
    std::vector<std::size_t> idx(train.size());
    for (std::size_t attempt = 0; attempt <= max_bootstrap_redraws; ++attempt) {
        rng gen(derive_seed(seed, attempt));
        std::array<std::size_t, num_classes> seen{};
        for (auto& i : idx) {
            i = static_cast<std::size_t>(gen.below(train.size()));
            ++seen[static_cast<std::size_t>(train.label(i))];
        }
        if (seen[0] > 0 && seen[1] > 0) return idx;
    }
    throw degenerate_bootstrap("dataset '" + train.name() + "': no two-class bootstrap sample after " +
                               std::to_string(max_bootstrap_redraws) + " redraws");
}

inline Dataset bootstrap(const Dataset& train, std::uint64_t seed) {
    return train.subset(bootstrap_indices(train, seed));
}

/// Ordered pool of trained perceptrons. Member order is part of the contract:
/// selection ties resolve toward lower indices.
struct ClassifierPool {
    std::vector<Perceptron> members;
    std::uint64_t generation_seed = 0;

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    const Perceptron& operator[](std::size_t i) const { return members[i]; }
};

/// Bagging: member i is trained on its own bootstrap of `train`.
inline ClassifierPool generate_pool(const Dataset& train, std::size_t n, std::uint64_t seed,
                                    PerceptronConfig base = {}) {
    if (n == 0) throw contract_error("pool size must be at least 1");
    ClassifierPool pool;
    pool.generation_seed = seed;
    pool.members.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto member_seed = derive_seed(seed, i);
        auto config = base;
        config.seed = derive_seed(member_seed, 0x747261696e);
        auto clf = train_perceptron(bootstrap(train, member_seed), config);
        clf.index = i;
        pool.members.push_back(std::move(clf));
    }
    return pool;
}

inline nlohmann::json to_json(const ClassifierPool& pool) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : pool.members)
        members.push_back({{"index", m.index}, {"weights", m.weights}, {"bias", m.bias}});
    return {{"schema", 1}, {"generation_seed", pool.generation_seed}, {"members", std::move(members)}};
}

inline ClassifierPool pool_from_json(const nlohmann::json& j) {
    if (j.value("schema", 0) != 1) throw contract_error("unsupported pool schema");
    ClassifierPool pool;
    pool.generation_seed = j.at("generation_seed").get<std::uint64_t>();
    for (const auto& m : j.at("members")) {
        Perceptron p;
        p.index = m.at("index").get<std::size_t>();
        p.weights = m.at("weights").get<std::vector<double>>();
        p.bias = m.at("bias").get<double>();
        if (p.index != pool.members.size()) throw contract_error("pool member indices must be contiguous");
        pool.members.push_back(std::move(p));
    }
    if (pool.members.empty()) throw contract_error("pool must contain at least one member");
    return pool;
}

} // namespace firedes

#endif // FIREDES_GENERATION_HPP
