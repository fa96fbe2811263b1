#ifndef FIREDES_INGESTION_HPP
#define FIREDES_INGESTION_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "firedes/dataset.hpp"
#include "firedes/error.hpp"
#include "firedes/random.hpp"

namespace firedes {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(',', start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline bool parse_real(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

} // namespace detail

/// Parse a KEEL `.dat` document. The last attribute is the class.
///
/// `@inputs`/`@outputs` lines are accepted and ignored; `%` lines are comments.
/// Missing values (`?`) are rejected.
inline Dataset parse_keel(std::string_view text, std::string fallback_name = "dataset") {
    std::string name = std::move(fallback_name);
    std::size_t n_attributes = 0;
    bool in_data = false;

    std::vector<double> features;
    std::vector<Label> labels;
    std::vector<std::string> class_names;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '%') continue;

        if (!in_data) {
            if (line.front() != '@') throw parse_error(line_no, "expected a header directive before @data");
            if (detail::starts_with_ci(line, "@relation")) {
                auto rest = detail::trim(line.substr(9));
                if (rest.empty()) throw parse_error(line_no, "@relation without a name");
                name = std::string(rest);
            } else if (detail::starts_with_ci(line, "@attribute")) {
                if (detail::trim(line.substr(10)).empty())
                    throw parse_error(line_no, "@attribute without a name");
                ++n_attributes;
            } else if (detail::starts_with_ci(line, "@input") || detail::starts_with_ci(line, "@output")) {
                // column roles are implied: every attribute but the last is an input
            } else if (detail::starts_with_ci(line, "@data")) {
                if (n_attributes < 2)
                    throw parse_error(line_no, "need at least one feature attribute and a class attribute");
                in_data = true;
            } else {
                throw parse_error(line_no, "unknown header directive '" + std::string(line) + "'");
            }
            continue;
        }

        const auto fields = detail::split_commas(line);
        if (fields.size() != n_attributes)
            throw parse_error(line_no, "expected " + std::to_string(n_attributes) + " values, found " +
                                           std::to_string(fields.size()));
        for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
            if (fields[j] == "?") throw parse_error(line_no, "missing value '?' is not supported");
            double v = 0.0;
            if (!detail::parse_real(fields[j], v))
                throw parse_error(line_no, "non-numeric feature value '" + std::string(fields[j]) + "'");
            features.push_back(v);
        }
        const auto cls = std::string(fields.back());
        if (cls.empty() || cls == "?") throw parse_error(line_no, "missing class value");
        auto it = std::find(class_names.begin(), class_names.end(), cls);
        if (it == class_names.end()) {
            class_names.push_back(cls);
            it = class_names.end() - 1;
        }
        labels.push_back(static_cast<Label>(it - class_names.begin()));
    }

    if (!in_data) throw parse_error(line_no, "no @data section");
    if (class_names.size() != num_classes)
        throw unsupported_problem("dataset '" + name + "' has " + std::to_string(class_names.size()) +
                                  " classes; only binary problems are supported");
    return Dataset(name, n_attributes - 1, std::move(features), std::move(labels), std::move(class_names));
}

inline Dataset load_keel(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_keel(buf.str(), path.stem().string());
    } catch (const parse_error& e) {
        throw parse_error(e.line(), e.detail(), path.string());
    }
}

/// Per-feature bounds fitted on one set and applied to others.
struct MinMaxScaler {
    std::vector<double> lower;
    std::vector<double> upper;

    static MinMaxScaler fit(const Dataset& train) {
        if (train.empty()) throw contract_error("cannot fit scaling on an empty set");
        MinMaxScaler s;
        s.lower.assign(train.n_features(), std::numeric_limits<double>::infinity());
        s.upper.assign(train.n_features(), -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < train.size(); ++i) {
            auto r = train.row(i);
            for (std::size_t j = 0; j < r.size(); ++j) {
                s.lower[j] = std::min(s.lower[j], r[j]);
                s.upper[j] = std::max(s.upper[j], r[j]);
            }
        }
        return s;
    }

    /// Constant columns map to 0; values outside the fitted bounds are clamped.
    Dataset apply(const Dataset& data) const {
        if (data.n_features() != lower.size()) throw contract_error("scaler dimension mismatch");
        std::vector<double> out(data.features().begin(), data.features().end());
        const std::size_t d = lower.size();
        for (std::size_t k = 0; k < out.size(); ++k) {
            const std::size_t j = k % d;
            const double span = upper[j] - lower[j];
            out[k] = span > 0.0 ? std::clamp((out[k] - lower[j]) / span, 0.0, 1.0) : 0.0;
        }
        return data.with_features(std::move(out));
    }
};

inline std::pair<Dataset, std::vector<Dataset>> minmax_fit_apply(const Dataset& train,
                                                                 const std::vector<Dataset>& others) {
    const auto scaler = MinMaxScaler::fit(train);
    std::vector<Dataset> scaled;
    scaled.reserve(others.size());
    for (const auto& d : others) scaled.push_back(scaler.apply(d));
    return {scaler.apply(train), std::move(scaled)};
}

/// Stratified assignment of `indices` into `n_folds` folds.
///
/// Each class is shuffled independently and dealt round-robin, so remainders land
/// in the lowest-numbered folds. Fold contents are returned in ascending index order.
inline std::vector<std::vector<std::size_t>> stratified_folds(std::span<const Label> labels,
                                                             std::span<const std::size_t> indices,
                                                             std::size_t n_folds, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> folds(n_folds);
    for (Label y = 0; y < static_cast<Label>(num_classes); ++y) {
        std::vector<std::size_t> members;
        for (std::size_t i : indices)
            if (labels[i] == y) members.push_back(i);
        rng gen(derive_seed(seed, static_cast<std::uint64_t>(y)));
        gen.shuffle(std::span<std::size_t>(members));
        for (std::size_t p = 0; p < members.size(); ++p) folds[p % n_folds].push_back(members[p]);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

struct ReplicationSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
    std::vector<std::size_t> test_indices;
    int replication_id = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t outer_folds = 5;
inline constexpr std::size_t inner_folds = 4;
inline constexpr std::size_t replications_per_dataset = outer_folds * inner_folds;

/// 20 train/validation/test splits: stratified 5-fold for test, then stratified
/// 4-fold of the remainder for validation. Features are left unscaled.
inline std::vector<ReplicationSplit> make_replications(const Dataset& data, std::uint64_t seed) {
    for (Label y = 0; y < static_cast<Label>(num_classes); ++y) {
        if (data.class_count(y) < outer_folds)
            throw insufficient_data("dataset '" + data.name() + "': class '" +
                                    data.class_names()[static_cast<std::size_t>(y)] + "' has " +
                                    std::to_string(data.class_count(y)) +
                                    " samples; stratified 5-fold needs at least 5");
    }

    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto outer = stratified_folds(data.labels(), all, outer_folds, derive_seed(seed, 0x6f75746572));

    std::vector<ReplicationSplit> splits;
    splits.reserve(replications_per_dataset);
    for (std::size_t f = 0; f < outer_folds; ++f) {
        std::vector<std::size_t> rest;
        for (std::size_t g = 0; g < outer_folds; ++g)
            if (g != f) rest.insert(rest.end(), outer[g].begin(), outer[g].end());
        std::sort(rest.begin(), rest.end());
        const auto inner = stratified_folds(data.labels(), rest, inner_folds, derive_seed(seed, 0x100 + f));

        for (std::size_t v = 0; v < inner_folds; ++v) {
            ReplicationSplit s;
            s.replication_id = static_cast<int>(f * inner_folds + v);
            s.seed = seed;
            s.test_indices = outer[f];
            s.validation_indices = inner[v];
            for (std::size_t g = 0; g < inner_folds; ++g)
                if (g != v) s.train_indices.insert(s.train_indices.end(), inner[g].begin(), inner[g].end());
            std::sort(s.train_indices.begin(), s.train_indices.end());
            s.train = data.subset(s.train_indices);
            s.validation = data.subset(s.validation_indices);
            s.test = data.subset(s.test_indices);
            splits.push_back(std::move(s));
        }
    }
    return splits;
}

} // namespace firedes

#endif // FIREDES_INGESTION_HPP
