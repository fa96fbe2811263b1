#ifndef FIREDES_EVALUATION_HPP
#define FIREDES_EVALUATION_HPP

#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "firedes/dataset.hpp"
#include "firedes/error.hpp"
#include "firedes/generation.hpp"
#include "firedes/region.hpp"

namespace firedes {

/// Outputs of a set of classifiers on one region of competence and its query.
///
/// Everything the selection techniques need is here, so they never touch the
/// perceptrons directly. Classifiers are "active" pool members, listed in
/// ascending pool order; member tables are classifier-major.
struct RegionEvaluation {
    std::vector<std::size_t> pool_indices;
    std::vector<Label> member_labels;
    std::vector<double> member_distances;
    std::vector<Label> member_predictions;  // [c * n_members + j]
    std::vector<double> member_proba;       // P(label 1), same layout
    std::vector<Label> query_predictions;
    std::vector<double> query_proba;        // P(label 1)
    Label minority = 0;

    std::size_t n_classifiers() const noexcept { return pool_indices.size(); }
    std::size_t n_members() const noexcept { return member_labels.size(); }

    Label prediction(std::size_t c, std::size_t j) const { return member_predictions[c * n_members() + j]; }
    double proba1(std::size_t c, std::size_t j) const { return member_proba[c * n_members() + j]; }
    bool correct(std::size_t c, std::size_t j) const { return prediction(c, j) == member_labels[j]; }

    /// P(label y | member j) under classifier c.
    double proba_of(std::size_t c, std::size_t j, Label y) const {
        const double p = proba1(c, j);
        return y == 1 ? p : 1.0 - p;
    }

    double query_proba_of(std::size_t c, Label y) const {
        const double p = query_proba[c];
        return y == 1 ? p : 1.0 - p;
    }

    /// Same region, only the classifiers at the given positions (ascending).
    RegionEvaluation restrict_to(std::span<const std::size_t> positions) const {
        RegionEvaluation out;
        out.member_labels = member_labels;
        out.member_distances = member_distances;
        out.minority = minority;
        const auto m = n_members();
        for (std::size_t c : positions) {
            if (c >= n_classifiers()) throw contract_error("classifier position out of range");
            out.pool_indices.push_back(pool_indices[c]);
            out.member_predictions.insert(out.member_predictions.end(), member_predictions.begin() + c * m,
                                          member_predictions.begin() + (c + 1) * m);
            out.member_proba.insert(out.member_proba.end(), member_proba.begin() + c * m,
                                    member_proba.begin() + (c + 1) * m);
            out.query_predictions.push_back(query_predictions[c]);
            out.query_proba.push_back(query_proba[c]);
        }
        return out;
    }

    /// Drop the last (farthest) member.
    RegionEvaluation without_farthest() const {
        RegionEvaluation out;
        out.pool_indices = pool_indices;
        out.minority = minority;
        out.query_predictions = query_predictions;
        out.query_proba = query_proba;
        const auto m = n_members();
        if (m == 0) return out;
        out.member_labels.assign(member_labels.begin(), member_labels.end() - 1);
        out.member_distances.assign(member_distances.begin(), member_distances.end() - 1);
        for (std::size_t c = 0; c < n_classifiers(); ++c) {
            out.member_predictions.insert(out.member_predictions.end(), member_predictions.begin() + c * m,
                                          member_predictions.begin() + c * m + (m - 1));
            out.member_proba.insert(out.member_proba.end(), member_proba.begin() + c * m,
                                    member_proba.begin() + c * m + (m - 1));
        }
        return out;
    }
};

/// Margins of every pool member on every row of a dataset, computed once and
/// reused for all queries whose regions are drawn from that dataset.
class PoolOutputs {
public:
    PoolOutputs(const ClassifierPool& pool, const Dataset& data)
        : n_rows_(data.size()), margins_(pool.size() * data.size()), norms_(pool.size()) {
        for (std::size_t c = 0; c < pool.size(); ++c) {
            norms_[c] = weight_norm(pool[c]);
            for (std::size_t i = 0; i < data.size(); ++i) margins_[c * n_rows_ + i] = margin(pool[c], data.row(i));
        }
    }

    std::size_t n_classifiers() const noexcept { return norms_.size(); }
    std::size_t n_rows() const noexcept { return n_rows_; }
    double margin_at(std::size_t c, std::size_t row) const { return margins_[c * n_rows_ + row]; }
    double norm(std::size_t c) const { return norms_[c]; }

private:
    std::size_t n_rows_;
    std::vector<double> margins_;
    std::vector<double> norms_;
};

namespace detail {

inline std::vector<std::size_t> all_positions(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

inline void fill_region_metadata(RegionEvaluation& ev, const RegionOfCompetence& roc) {
    ev.minority = roc.minority;
    for (const auto& m : roc.members) {
        ev.member_labels.push_back(m.label);
        ev.member_distances.push_back(m.distance);
    }
}

} // namespace detail

/// Evaluate the given pool members (ascending pool indices) on a region.
inline RegionEvaluation evaluate_region(const ClassifierPool& pool, const RegionOfCompetence& roc,
                                        std::span<const std::size_t> active) {
    RegionEvaluation ev;
    detail::fill_region_metadata(ev, roc);
    for (std::size_t c : active) {
        const auto& clf = pool.members.at(c);
        const double norm = weight_norm(clf);
        ev.pool_indices.push_back(c);
        for (std::size_t j = 0; j < roc.size(); ++j) {
            const double m = margin(clf, roc.row(j));
            ev.member_predictions.push_back(m >= 0.0 ? 1 : 0);
            ev.member_proba.push_back(proba_from_margin(m, norm));
        }
        const double mq = margin(clf, roc.query);
        ev.query_predictions.push_back(mq >= 0.0 ? 1 : 0);
        ev.query_proba.push_back(proba_from_margin(mq, norm));
    }
    return ev;
}

inline RegionEvaluation evaluate_region(const ClassifierPool& pool, const RegionOfCompetence& roc) {
    const auto all = detail::all_positions(pool.size());
    return evaluate_region(pool, roc, all);
}

/// Same as evaluate_region, reading member margins from a cache built on the
/// dataset the region was drawn from. Produces bit-identical values.
inline RegionEvaluation evaluate_region(const ClassifierPool& pool, const PoolOutputs& cache,
                                        const RegionOfCompetence& roc) {
    if (cache.n_classifiers() != pool.size()) throw contract_error("cache does not match pool");
    RegionEvaluation ev;
    detail::fill_region_metadata(ev, roc);
    for (std::size_t c = 0; c < pool.size(); ++c) {
        const double norm = cache.norm(c);
        ev.pool_indices.push_back(c);
        for (const auto& member : roc.members) {
            const double m = cache.margin_at(c, member.index);
            ev.member_predictions.push_back(m >= 0.0 ? 1 : 0);
            ev.member_proba.push_back(proba_from_margin(m, norm));
        }
        const double mq = margin(pool[c], roc.query);
        ev.query_predictions.push_back(mq >= 0.0 ? 1 : 0);
        ev.query_proba.push_back(proba_from_margin(mq, norm));
    }
    return ev;
}

} // namespace firedes

#endif // FIREDES_EVALUATION_HPP
