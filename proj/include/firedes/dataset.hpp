#ifndef FIREDES_DATASET_HPP
#define FIREDES_DATASET_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "firedes/error.hpp"

namespace firedes {

/// Binary class label. Values are 0 or 1, assigned by first appearance in the source file.
using Label = int;

inline constexpr std::size_t num_classes = 2;

/// Labelled feature vectors for a binary problem.
///
/// Features are stored row-major. The minority label is fixed when a dataset is
/// read from disk and is inherited by every subset taken from it, so train,
/// validation and filtered sets all agree on which class is protected.
class Dataset {
public:
    Dataset() = default;

    /// `minority` < 0 means "derive from the class counts" (ties go to label 0).
    Dataset(std::string name, std::size_t n_features, std::vector<double> features,
            std::vector<Label> labels, std::vector<std::string> class_names = {"0", "1"},
            Label minority = -1)
        : name_(std::move(name)),
          n_features_(n_features),
          features_(std::move(features)),
          labels_(std::move(labels)),
          class_names_(std::move(class_names)) {
        if (n_features_ == 0 && !labels_.empty())
            throw contract_error("dataset '" + name_ + "' has no features");
        if (features_.size() != labels_.size() * n_features_)
            throw contract_error("dataset '" + name_ + "': feature matrix does not match label count");
        if (class_names_.size() != num_classes)
            throw contract_error("dataset '" + name_ + "': expected two class names");
        for (Label y : labels_) {
            if (y != 0 && y != 1) throw contract_error("dataset '" + name_ + "': labels must be 0 or 1");
            ++counts_[static_cast<std::size_t>(y)];
        }
        if (minority < 0)
            minority_ = counts_[1] < counts_[0] ? 1 : 0;
        else if (minority <= 1)
            minority_ = minority;
        else
            throw contract_error("dataset '" + name_ + "': minority label out of range");
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t n_features() const noexcept { return n_features_; }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_features_, n_features_};
    }
    Label label(std::size_t i) const { return labels_[i]; }

    std::span<const double> features() const noexcept { return features_; }
    std::span<const Label> labels() const noexcept { return labels_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    std::size_t class_count(Label y) const { return counts_.at(static_cast<std::size_t>(y)); }
    Label minority_label() const noexcept { return minority_; }
    Label majority_label() const noexcept { return 1 - minority_; }
    bool is_minority(Label y) const noexcept { return y == minority_; }
    bool has_both_classes() const noexcept { return counts_[0] > 0 && counts_[1] > 0; }

    /// Majority count over minority count, using the dataset-level minority designation.
    double imbalance_ratio() const {
        const auto minority = class_count(minority_);
        if (minority == 0) return 0.0;
        return static_cast<double>(class_count(majority_label())) / static_cast<double>(minority);
    }

    /// Rows at `indices`, in that order. Class names and minority designation carry over.
    Dataset subset(std::span<const std::size_t> indices, std::string name = {}) const {
        std::vector<double> features;
        std::vector<Label> labels;
        features.reserve(indices.size() * n_features_);
        labels.reserve(indices.size());
        for (std::size_t i : indices) {
            if (i >= size()) throw contract_error("subset index out of range");
            auto r = row(i);
            features.insert(features.end(), r.begin(), r.end());
            labels.push_back(labels_[i]);
        }
        return Dataset(name.empty() ? name_ : std::move(name), n_features_, std::move(features),
                       std::move(labels), class_names_, minority_);
    }

    /// Same labels and metadata, new feature matrix (used by scaling).
    Dataset with_features(std::vector<double> features) const {
        return Dataset(name_, n_features_, std::move(features), labels_, class_names_, minority_);
    }

private:
    std::string name_;
    std::size_t n_features_ = 0;
    std::vector<double> features_;
    std::vector<Label> labels_;
    std::vector<std::string> class_names_{"0", "1"};
    std::array<std::size_t, num_classes> counts_{};
    Label minority_ = 0;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

} // namespace firedes

#endif // FIREDES_DATASET_HPP
