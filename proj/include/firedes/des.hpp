#ifndef FIREDES_DES_HPP
#define FIREDES_DES_HPP

#include <algorithm>
#include <cctype>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "firedes/error.hpp"
#include "firedes/evaluation.hpp"

namespace firedes {

/// Per-classifier competence, aligned with RegionEvaluation::pool_indices.
using CompetenceVector = std::vector<double>;

struct Decision {
    Label label = 0;
    /// Score of the minority (positive) class, used for ROC analysis.
    double positive_score = 0.5;
    std::vector<std::size_t> selected_indices;  // pool indices
};

enum class Technique { ola, lca, apriori, aposteriori, mcb, dsknn, knu, kne };

inline constexpr std::array<Technique, 8> all_techniques{Technique::ola,   Technique::lca, Technique::apriori,
                                                         Technique::aposteriori, Technique::mcb,
                                                         Technique::dsknn, Technique::knu, Technique::kne};

inline std::string to_string(Technique t) {
    switch (t) {
        case Technique::ola: return "OLA";
        case Technique::lca: return "LCA";
        case Technique::apriori: return "APRI";
        case Technique::aposteriori: return "APOS";
        case Technique::mcb: return "MCB";
        case Technique::dsknn: return "DSKNN";
        case Technique::knu: return "KNU";
        case Technique::kne: return "KNE";
    }
    return "?";
}

inline Technique technique_from_string(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    for (auto t : all_techniques)
        if (to_string(t) == s) return t;
    throw contract_error("unknown technique '" + s + "'");
}

struct DesParams {
    double mcb_similarity = 0.7;
    double mcb_difference = 0.1;
    double dsknn_accuracy = 0.5;
    double dsknn_diversity = 0.3;
};

namespace detail {

inline void require_region(const RegionEvaluation& ev, const char* who) {
    if (ev.n_members() == 0) throw contract_error(std::string(who) + ": empty region of competence");
    if (ev.n_classifiers() == 0) throw contract_error(std::string(who) + ": empty pool");
}

inline double inverse_distance(double d) { return 1.0 / std::max(d, 1e-12); }

/// First position holding the maximum.
inline std::size_t argmax(const CompetenceVector& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline Decision single_classifier(const RegionEvaluation& ev, std::size_t c) {
    Decision d;
    d.label = ev.query_predictions[c];
    d.positive_score = ev.query_proba_of(c, ev.minority);
    d.selected_indices = {ev.pool_indices[c]};
    return d;
}

/// Weighted vote over the given positions. Equal class totals go to the minority class.
inline Decision weighted_vote(const RegionEvaluation& ev, const std::vector<std::size_t>& positions,
                              const std::vector<double>& weights) {
    std::array<double, num_classes> total{};
    for (std::size_t i = 0; i < positions.size(); ++i)
        total[static_cast<std::size_t>(ev.query_predictions[positions[i]])] += weights[i];
    const Label minority = ev.minority;
    const double t_min = total[static_cast<std::size_t>(minority)];
    const double t_maj = total[static_cast<std::size_t>(1 - minority)];
    Decision d;
    d.label = t_min >= t_maj ? minority : 1 - minority;
    const double sum = t_min + t_maj;
    d.positive_score = sum > 0.0 ? t_min / sum : 0.5;
    for (std::size_t c : positions) d.selected_indices.push_back(ev.pool_indices[c]);
    return d;
}

inline Decision majority_vote(const RegionEvaluation& ev, const std::vector<std::size_t>& positions) {
    return weighted_vote(ev, positions, std::vector<double>(positions.size(), 1.0));
}

inline Decision majority_vote(const RegionEvaluation& ev) {
    return majority_vote(ev, all_positions(ev.n_classifiers()));
}

} // namespace detail

/// Overall local accuracy: fraction of region members classified correctly.
inline CompetenceVector ola(const RegionEvaluation& ev) {
    detail::require_region(ev, "ola");
    CompetenceVector s(ev.n_classifiers(), 0.0);
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < ev.n_members(); ++j) hits += ev.correct(c, j);
        s[c] = static_cast<double>(hits) / static_cast<double>(ev.n_members());
    }
    return s;
}

/// Local class accuracy: accuracy restricted to the members whose true label is
/// the class the classifier assigns to the query. No such member gives 0.
inline CompetenceVector lca(const RegionEvaluation& ev) {
    detail::require_region(ev, "lca");
    CompetenceVector s(ev.n_classifiers(), 0.0);
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        const Label w = ev.query_predictions[c];
        std::size_t of_class = 0;
        std::size_t hits = 0;
        for (std::size_t j = 0; j < ev.n_members(); ++j) {
            if (ev.member_labels[j] != w) continue;
            ++of_class;
            hits += ev.correct(c, j);
        }
        s[c] = of_class == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(of_class);
    }
    return s;
}

/// A priori: distance-weighted mean posterior of each member's true class.
inline CompetenceVector a_priori(const RegionEvaluation& ev) {
    detail::require_region(ev, "a_priori");
    CompetenceVector s(ev.n_classifiers(), 0.0);
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < ev.n_members(); ++j) {
            const double w = detail::inverse_distance(ev.member_distances[j]);
            num += ev.proba_of(c, j, ev.member_labels[j]) * w;
            den += w;
        }
        s[c] = num / den;
    }
    return s;
}

/// A posteriori: weighted share of the posterior mass for the predicted class
/// that falls on members actually of that class.
inline CompetenceVector a_posteriori(const RegionEvaluation& ev) {
    detail::require_region(ev, "a_posteriori");
    CompetenceVector s(ev.n_classifiers(), 0.0);
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        const Label w = ev.query_predictions[c];
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < ev.n_members(); ++j) {
            const double v = ev.proba_of(c, j, w) * detail::inverse_distance(ev.member_distances[j]);
            den += v;
            if (ev.member_labels[j] == w) num += v;
        }
        s[c] = den < 1e-12 ? 0.0 : num / den;
    }
    return s;
}

/// Pick the most competent classifier (ties: lower pool index).
inline Decision select_best(const RegionEvaluation& ev, const CompetenceVector& competence) {
    return detail::single_classifier(ev, detail::argmax(competence));
}

/// Multiple classifier behaviour. Members whose output profile resembles the
/// query's are kept; a single classifier is chosen only when it beats every
/// other one by more than `diff_threshold`, otherwise the pool votes.
inline Decision mcb(const RegionEvaluation& ev, double sim_threshold = 0.7, double diff_threshold = 0.1) {
    detail::require_region(ev, "mcb");
    const std::size_t n_clf = ev.n_classifiers();
    std::vector<std::size_t> similar;
    for (std::size_t j = 0; j < ev.n_members(); ++j) {
        std::size_t same = 0;
        for (std::size_t c = 0; c < n_clf; ++c) same += ev.prediction(c, j) == ev.query_predictions[c];
        if (static_cast<double>(same) / static_cast<double>(n_clf) >= sim_threshold) similar.push_back(j);
    }

    CompetenceVector score(n_clf, 0.0);
    const auto& members = similar.empty() ? detail::all_positions(ev.n_members()) : similar;
    for (std::size_t c = 0; c < n_clf; ++c) {
        std::size_t hits = 0;
        for (std::size_t j : members) hits += ev.correct(c, j);
        score[c] = static_cast<double>(hits) / static_cast<double>(members.size());
    }

    const std::size_t best = detail::argmax(score);
    bool dominant = true;
    for (std::size_t c = 0; c < n_clf && dominant; ++c)
        if (c != best) dominant = score[best] - score[c] > diff_threshold;
    return dominant ? detail::single_classifier(ev, best) : detail::majority_vote(ev);
}

/// Fraction of region members misclassified by both classifiers.
inline double double_fault(const RegionEvaluation& ev, std::size_t a, std::size_t b) {
    std::size_t both = 0;
    for (std::size_t j = 0; j < ev.n_members(); ++j) both += !ev.correct(a, j) && !ev.correct(b, j);
    return static_cast<double>(both) / static_cast<double>(ev.n_members());
}

/// DES-KNN: keep the ceil(pct_accuracy * n) most accurate classifiers, then grow
/// an ensemble of ceil(pct_diversity * n) from the most accurate one, each step
/// adding the candidate with the least summed double fault against the ensemble.
inline Decision desknn(const RegionEvaluation& ev, double pct_accuracy = 0.5, double pct_diversity = 0.3) {
    detail::require_region(ev, "desknn");
    const std::size_t n = ev.n_classifiers();
    const auto acc = ola(ev);

    std::vector<std::size_t> ranked = detail::all_positions(n);
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return acc[a] > acc[b]; });

    const auto count = [n](double pct) {
        const auto v = static_cast<std::size_t>(std::ceil(pct * static_cast<double>(n) - 1e-9));
        return std::clamp<std::size_t>(v, 1, n);
    };
    const std::size_t n_acc = count(pct_accuracy);
    const std::size_t n_div = std::min(count(pct_diversity), n_acc);
    ranked.resize(n_acc);

    std::vector<std::size_t> chosen{ranked.front()};
    std::vector<char> used(n_acc, 0);
    used[0] = 1;
    while (chosen.size() < n_div) {
        std::size_t pick = n_acc;
        double pick_fault = 0.0;
        for (std::size_t r = 0; r < n_acc; ++r) {
            if (used[r]) continue;
            double fault = 0.0;
            for (std::size_t s : chosen) fault += double_fault(ev, ranked[r], s);
            if (pick == n_acc || fault < pick_fault) {
                pick = r;
                pick_fault = fault;
            }
        }
        used[pick] = 1;
        chosen.push_back(ranked[pick]);
    }
    std::sort(chosen.begin(), chosen.end());
    return detail::majority_vote(ev, chosen);
}

/// KNORA-Union: each classifier votes with weight equal to the number of region
/// members it gets right.
inline Decision knora_u(const RegionEvaluation& ev) {
    detail::require_region(ev, "knora_u");
    std::vector<std::size_t> positions;
    std::vector<double> weights;
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        std::size_t hits = 0;
        for (std::size_t j = 0; j < ev.n_members(); ++j) hits += ev.correct(c, j);
        if (hits == 0) continue;
        positions.push_back(c);
        weights.push_back(static_cast<double>(hits));
    }
    if (positions.empty()) return detail::majority_vote(ev);
    return detail::weighted_vote(ev, positions, weights);
}

/// Classifiers correct on each of the `region_size` nearest members.
inline std::vector<std::size_t> oracle_positions(const RegionEvaluation& ev, std::size_t region_size) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < ev.n_classifiers(); ++c) {
        bool all = true;
        for (std::size_t j = 0; j < region_size && all; ++j) all = ev.correct(c, j);
        if (all) out.push_back(c);
    }
    return out;
}

/// KNORA-Eliminate: the classifiers correct on the whole region; while there is
/// none, the farthest member is dropped. An exhausted region means the whole pool.
inline Decision knora_e(const RegionEvaluation& ev) {
    detail::require_region(ev, "knora_e");
    for (std::size_t r = ev.n_members(); r > 0; --r) {
        auto chosen = oracle_positions(ev, r);
        if (!chosen.empty()) return detail::majority_vote(ev, chosen);
    }
    return detail::majority_vote(ev);
}

inline Decision decide(Technique technique, const RegionEvaluation& ev, const DesParams& params = {}) {
    detail::require_region(ev, "decide");
    if (ev.n_classifiers() == 1) return detail::single_classifier(ev, 0);
    switch (technique) {
        case Technique::ola: return select_best(ev, ola(ev));
        case Technique::lca: return select_best(ev, lca(ev));
        case Technique::apriori: return select_best(ev, a_priori(ev));
        case Technique::aposteriori: return select_best(ev, a_posteriori(ev));
        case Technique::mcb: return mcb(ev, params.mcb_similarity, params.mcb_difference);
        case Technique::dsknn: return desknn(ev, params.dsknn_accuracy, params.dsknn_diversity);
        case Technique::knu: return knora_u(ev);
        case Technique::kne: return knora_e(ev);
    }
    throw contract_error("unknown technique");
}

/// Convenience overload evaluating the whole pool on the region first.
inline Decision decide(Technique technique, const ClassifierPool& pool, const RegionOfCompetence& roc,
                       const DesParams& params = {}) {
    if (pool.empty()) throw contract_error("decide: empty pool");
    return decide(technique, evaluate_region(pool, roc), params);
}

} // namespace firedes

#endif // FIREDES_DES_HPP
