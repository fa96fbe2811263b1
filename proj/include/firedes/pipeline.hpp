#ifndef FIREDES_PIPELINE_HPP
#define FIREDES_PIPELINE_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "firedes/dataset.hpp"
#include "firedes/des.hpp"
#include "firedes/error.hpp"
#include "firedes/evaluation.hpp"
#include "firedes/filtering.hpp"
#include "firedes/generation.hpp"
#include "firedes/ingestion.hpp"
#include "firedes/pruning.hpp"
#include "firedes/random.hpp"
#include "firedes/region.hpp"

namespace firedes {

/// The eight ablation scenarios, I (plain DES) to VIII (all three stages).
enum class Scenario { I = 1, II, III, IV, V, VI, VII, VIII };

inline constexpr std::array<Scenario, 8> all_scenarios{Scenario::I,  Scenario::II,  Scenario::III, Scenario::IV,
                                                       Scenario::V,  Scenario::VI,  Scenario::VII, Scenario::VIII};

struct ScenarioSwitches {
    bool knne = false;
    bool filter = false;
    bool dfp = false;
};

inline constexpr ScenarioSwitches switches(Scenario s) {
    switch (s) {
        case Scenario::I: return {false, false, false};
        case Scenario::II: return {true, false, false};
        case Scenario::III: return {false, true, false};
        case Scenario::IV: return {false, false, true};
        case Scenario::V: return {true, true, false};
        case Scenario::VI: return {true, false, true};
        case Scenario::VII: return {false, true, true};
        case Scenario::VIII: return {true, true, true};
    }
    return {};
}

inline Scenario scenario_from_switches(bool knne, bool filter, bool dfp) {
    for (auto s : all_scenarios) {
        const auto w = switches(s);
        if (w.knne == knne && w.filter == filter && w.dfp == dfp) return s;
    }
    return Scenario::I;
}

inline std::string to_string(Scenario s) {
    static constexpr std::array<const char*, 8> names{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    return names[static_cast<std::size_t>(s) - 1];
}

inline Scenario scenario_from_string(const std::string& s) {
    for (auto sc : all_scenarios)
        if (to_string(sc) == s) return sc;
    throw contract_error("unknown scenario '" + s + "' (expected I..VIII)");
}

struct ScenarioConfig {
    bool use_knne = true;
    bool use_filter = true;
    bool use_dfp = true;
    Technique technique = Technique::kne;
    std::size_t k = default_region_k;
    std::size_t knne_k = 0;  // per-class KNNE size; 0 means k
    FilterKind filter_kind = FilterKind::enn;
    std::size_t enn_k = default_enn_k;
    std::size_t pool_size = 100;
    std::uint64_t seed = 0;
    DesParams params{};

    Scenario scenario() const { return scenario_from_switches(use_knne, use_filter, use_dfp); }

    static ScenarioConfig for_scenario(Scenario s, Technique t = Technique::kne) {
        ScenarioConfig c;
        const auto w = switches(s);
        c.use_knne = w.knne;
        c.use_filter = w.filter;
        c.use_dfp = w.dfp;
        c.technique = t;
        return c;
    }
};

inline RegionOfCompetence define_region(const Dataset& dsel, std::span<const double> query,
                                        const ScenarioConfig& cfg) {
    return cfg.use_knne ? knne_region(dsel, query, cfg.knne_k ? cfg.knne_k : cfg.k) : knn_region(dsel, query, cfg.k);
}

/// Selection phase on an already evaluated region: optional pruning, then the technique.
inline Decision select_and_decide(const RegionEvaluation& full, const ScenarioConfig& cfg) {
    if (!cfg.use_dfp) return decide(cfg.technique, full, cfg.params);
    const auto pruned = dfp_prune(full);
    std::vector<std::size_t> positions;
    positions.reserve(pruned.selected.size());
    // pool_indices of `full` are 0..n-1 in order, so pool index == position
    for (std::size_t idx : pruned.selected)
        positions.push_back(static_cast<std::size_t>(
            std::lower_bound(full.pool_indices.begin(), full.pool_indices.end(), idx) - full.pool_indices.begin()));
    return decide(cfg.technique, full.restrict_to(positions), cfg.params);
}

/// Classify one query. `dsel` must already be filtered when cfg.use_filter is set.
inline Decision classify_query(std::span<const double> query, const ClassifierPool& pool, const Dataset& dsel,
                               const ScenarioConfig& cfg) {
    if (pool.empty()) throw contract_error("classify_query: empty pool");
    const auto roc = define_region(dsel, query, cfg);
    return select_and_decide(evaluate_region(pool, roc), cfg);
}

/// Area under the ROC curve by pair counting: the probability that a random
/// positive outscores a random negative, ties counting one half.
inline double auc(std::span<const double> scores, std::span<const Label> labels, Label positive) {
    if (scores.size() != labels.size()) throw contract_error("auc: scores and labels differ in length");
    std::vector<std::pair<double, Label>> v;
    v.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) v.emplace_back(scores[i], labels[i]);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    double n_pos = 0.0;
    double n_neg = 0.0;
    double rank_sum = 0.0;  // sum of midranks of positives
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j].first == v[i].first) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (v[t].second == positive) {
                rank_sum += midrank;
                n_pos += 1.0;
            } else {
                n_neg += 1.0;
            }
        }
        i = j;
    }
    if (n_pos == 0.0 || n_neg == 0.0) throw undefined_metric("auc needs both positive and negative labels");
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

struct RunResult {
    std::string dataset;
    Scenario scenario = Scenario::I;
    Technique technique = Technique::kne;
    int replication_id = 0;
    double auc = 0.0;
    std::vector<Decision> decisions;  // only kept when auditing
};

struct ExperimentOptions {
    std::vector<Scenario> scenarios{all_scenarios.begin(), all_scenarios.end()};
    std::vector<Technique> techniques{Technique::kne};
    FilterKind filter_kind = FilterKind::enn;
    std::size_t enn_k = default_enn_k;
    std::size_t k = default_region_k;
    std::size_t knne_k = 0;
    std::size_t pool_size = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool keep_decisions = false;
    DesParams params{};
    /// Restrict to these replication ids (empty: all 20).
    std::vector<int> replications{};
};

struct DatasetFailure {
    std::string dataset;
    std::string message;
};

struct ExperimentOutcome {
    std::vector<RunResult> results;
    std::vector<DatasetFailure> failures;
};

/// Canonical result order: dataset, technique, scenario, replication.
inline void sort_results(std::vector<RunResult>& results) {
    std::sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
        return std::tuple(a.dataset, static_cast<int>(a.technique), static_cast<int>(a.scenario), a.replication_id) <
               std::tuple(b.dataset, static_cast<int>(b.technique), static_cast<int>(b.scenario), b.replication_id);
    });
}

/// Seed for one replication of one dataset. Independent of run order and of
/// which scenarios or techniques are requested.
inline std::uint64_t replication_seed(std::uint64_t master, const std::string& dataset, int replication) {
    return derive_seed(derive_seed(master, hash_name(dataset)), static_cast<std::uint64_t>(replication));
}

/// All requested (scenario, technique) runs for one replication. The pool and
/// the filtered validation set are built once and shared by every scenario.
inline std::vector<RunResult> run_replication(const ReplicationSplit& split, const std::string& dataset,
                                              const ExperimentOptions& opt) {
    auto [train, scaled] = minmax_fit_apply(split.train, {split.validation, split.test});
    const Dataset& dsel = scaled[0];
    const Dataset& test = scaled[1];

    const auto pool = generate_pool(train, opt.pool_size, replication_seed(opt.seed, dataset, split.replication_id));

    bool need_filter = false;
    for (auto s : opt.scenarios) need_filter = need_filter || switches(s).filter;
    std::optional<Dataset> filtered;
    if (need_filter) filtered = apply_filter(dsel, opt.filter_kind, opt.enn_k).data;

    const PoolOutputs raw_outputs(pool, dsel);
    std::optional<PoolOutputs> filtered_outputs;
    if (filtered) filtered_outputs.emplace(pool, *filtered);

    std::vector<RunResult> out;
    for (auto technique : opt.techniques) {
        for (auto scenario : opt.scenarios) {
            auto cfg = ScenarioConfig::for_scenario(scenario, technique);
            cfg.k = opt.k;
            cfg.knne_k = opt.knne_k;
            cfg.params = opt.params;
            const Dataset& region_source = cfg.use_filter ? *filtered : dsel;
            const PoolOutputs& outputs = cfg.use_filter ? *filtered_outputs : raw_outputs;

            RunResult r;
            r.dataset = dataset;
            r.scenario = scenario;
            r.technique = technique;
            r.replication_id = split.replication_id;
            std::vector<double> scores;
            scores.reserve(test.size());
            for (std::size_t q = 0; q < test.size(); ++q) {
                const auto roc = define_region(region_source, test.row(q), cfg);
                auto d = select_and_decide(evaluate_region(pool, outputs, roc), cfg);
                scores.push_back(d.positive_score);
                if (opt.keep_decisions) r.decisions.push_back(std::move(d));
            }
            r.auc = auc(scores, test.labels(), test.minority_label());
            out.push_back(std::move(r));
        }
    }
    return out;
}

/// Full protocol over several datasets. A dataset that fails is reported and
/// skipped. Work units (dataset, replication) run on `opt.jobs` threads; the
/// results are sorted canonically, so the output does not depend on scheduling.
inline ExperimentOutcome run_experiment(const std::vector<Dataset>& datasets, const ExperimentOptions& opt) {
    struct Unit {
        std::size_t dataset;
        ReplicationSplit split;
    };
    ExperimentOutcome outcome;
    std::vector<Unit> units;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        try {
            for (auto& s : make_replications(datasets[d], derive_seed(opt.seed, hash_name(datasets[d].name())))) {
                if (!opt.replications.empty() &&
                    std::find(opt.replications.begin(), opt.replications.end(), s.replication_id) ==
                        opt.replications.end())
                    continue;
                units.push_back({d, std::move(s)});
            }
        } catch (const error& e) {
            outcome.failures.push_back({datasets[d].name(), e.what()});
        }
    }

    std::vector<std::vector<RunResult>> per_unit(units.size());
    std::vector<std::string> unit_error(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t u = next++; u < units.size(); u = next++) {
            try {
                per_unit[u] = run_replication(units[u].split, datasets[units[u].dataset].name(), opt);
            } catch (const std::exception& e) {
                unit_error[u] = e.what();
            }
        }
    };
    const std::size_t n_threads = std::max<std::size_t>(1, std::min(opt.jobs, units.size()));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    }

    std::vector<char> failed(datasets.size(), 0);
    for (std::size_t u = 0; u < units.size(); ++u) {
        const auto d = units[u].dataset;
        if (unit_error[u].empty() || failed[d]) continue;
        failed[d] = 1;
        outcome.failures.push_back({datasets[d].name(), unit_error[u]});
    }
    for (std::size_t u = 0; u < units.size(); ++u) {
        if (failed[units[u].dataset]) continue;
        for (auto& r : per_unit[u]) outcome.results.push_back(std::move(r));
    }
    sort_results(outcome.results);
    return outcome;
}

inline nlohmann::json to_json(const RunResult& r) {
    nlohmann::json j{{"dataset", r.dataset},
                     {"scenario", to_string(r.scenario)},
                     {"technique", to_string(r.technique)},
                     {"replication_id", r.replication_id},
                     {"auc", r.auc}};
    if (!r.decisions.empty()) {
        auto& ds = j["decisions"] = nlohmann::json::array();
        for (const auto& d : r.decisions)
            ds.push_back({{"label", d.label}, {"positive_score", d.positive_score}, {"selected", d.selected_indices}});
    }
    return j;
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
    RunResult r;
    r.dataset = j.at("dataset").get<std::string>();
    r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    r.technique = technique_from_string(j.at("technique").get<std::string>());
    r.replication_id = j.at("replication_id").get<int>();
    r.auc = j.at("auc").get<double>();
    return r;
}

inline constexpr int results_schema_version = 1;

/// `{"schema": 1, "results": [...]}` with records in canonical order.
inline nlohmann::json results_document(std::vector<RunResult> results) {
    sort_results(results);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    return {{"schema", results_schema_version}, {"results", std::move(arr)}};
}

inline std::vector<RunResult> results_from_document(const nlohmann::json& doc) {
    if (!doc.is_object() || doc.value("schema", 0) != results_schema_version)
        throw contract_error("results document must carry \"schema\": 1");
    std::vector<RunResult> out;
    for (const auto& r : doc.at("results")) out.push_back(run_result_from_json(r));
    return out;
}

} // namespace firedes

#endif // FIREDES_PIPELINE_HPP
