#ifndef FIREDES_CLI_HPP
#define FIREDES_CLI_HPP

// Command-line front end: run, filter, stats and report.
// Every command validates its inputs before doing any work and writes only
// under the output directory it was given.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "firedes/error.hpp"
#include "firedes/filtering.hpp"
#include "firedes/ingestion.hpp"
#include "firedes/pipeline.hpp"
#include "firedes/stats.hpp"

namespace firedes::cli {

inline constexpr const char* version = "1.0.0";

enum exit_code : int { ok = 0, usage = 2, runtime = 3 };

/// Bad configuration or arguments; maps to exit status 2.
class config_error : public error {
public:
    using error::error;
};

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- helpers

inline std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw config_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write " + p.string());
    out << text;
    if (!out) throw error("write failed for " + p.string());
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline std::vector<Scenario> parse_scenarios(const std::string& list) {
    if (list == "all") return {all_scenarios.begin(), all_scenarios.end()};
    std::vector<Scenario> out;
    for (const auto& s : split_list(list)) {
        try {
            const auto sc = scenario_from_string(s);
            if (std::find(out.begin(), out.end(), sc) == out.end()) out.push_back(sc);
        } catch (const error&) {
            throw config_error("unknown scenario '" + s + "' (expected I..VIII or all)");
        }
    }
    if (out.empty()) throw config_error("no scenarios selected");
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Technique> parse_techniques(const std::string& list) {
    if (list == "all") return {all_techniques.begin(), all_techniques.end()};
    std::vector<Technique> out;
    for (const auto& s : split_list(list)) {
        try {
            const auto t = technique_from_string(s);
            if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
        } catch (const error&) {
            throw config_error("unknown technique '" + s + "'");
        }
    }
    if (out.empty()) throw config_error("no techniques selected");
    std::sort(out.begin(), out.end());
    return out;
}

inline FilterKind parse_filter(const std::string& s) {
    try {
        return filter_kind_from_string(s);
    } catch (const error&) {
        throw config_error("unknown filter '" + s + "' (expected enn or rng)");
    }
}

/// Expand files and directories into a sorted list of `.dat` files.
inline std::vector<fs::path> resolve_dataset_paths(const std::vector<std::string>& entries, const fs::path& base) {
    std::vector<fs::path> out;
    for (const auto& e : entries) {
        fs::path p(e);
        if (p.is_relative() && !base.empty()) p = base / p;
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> files;
            for (const auto& f : fs::directory_iterator(p))
                if (f.is_regular_file() && f.path().extension() == ".dat") files.push_back(f.path());
            if (files.empty()) throw config_error("dataset directory " + p.string() + " contains no .dat files");
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else if (fs::is_regular_file(p, ec)) {
            out.push_back(p);
        } else {
            throw config_error("dataset path not found: " + p.string());
        }
    }
    return out;
}

// ---------------------------------------------------------------- config

struct ExperimentConfig {
    std::vector<std::string> datasets;
    fs::path base_dir;  // relative dataset paths resolve against the config file
    std::string scenarios = "all";
    std::string techniques = "KNE";
    std::string filter = "enn";
    std::size_t k = default_region_k;
    std::size_t knne_k = 0;  // 0: same as k
    std::size_t enn_k = default_enn_k;
    std::size_t pool_size = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t jobs = 1;
    std::vector<int> replications;
    bool keep_decisions = false;
};

/// Command-line overrides; any value set here beats the config file.
struct RunOverrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> jobs;
    std::optional<std::string> scenarios;
    std::optional<std::string> techniques;
    std::optional<std::string> filter;
    std::optional<std::size_t> k;
    std::vector<std::string> datasets;
};

namespace detail {

inline std::string list_or_string(const json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) {
            if (!e.is_string()) throw config_error(std::string("\"") + key + "\" entries must be strings");
            s += (s.empty() ? "" : ",") + e.get<std::string>();
        }
        return s;
    }
    throw config_error(std::string("\"") + key + "\" must be a string or an array of strings");
}

inline std::size_t positive(const json& v, const char* key) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
        throw config_error(std::string("\"") + key + "\" must be a positive integer");
    return v.get<std::size_t>();
}

} // namespace detail

inline ExperimentConfig config_from_json(const json& j, const fs::path& base_dir = {}) {
    static const std::set<std::string> known{"datasets", "scenarios", "techniques", "filter", "k", "knne_k", "enn_k",
                                             "pool_size", "seed",     "out",        "jobs",   "replications",
                                             "keep_decisions"};
    if (!j.is_object()) throw config_error("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw config_error("unknown config key \"" + key + "\"");

    ExperimentConfig c;
    c.base_dir = base_dir;
    if (j.contains("datasets")) {
        const auto& d = j["datasets"];
        if (d.is_string()) {
            c.datasets.push_back(d.get<std::string>());
        } else if (d.is_array()) {
            for (const auto& e : d) {
                if (!e.is_string()) throw config_error("\"datasets\" entries must be strings");
                c.datasets.push_back(e.get<std::string>());
            }
        } else {
            throw config_error("\"datasets\" must be a path or an array of paths");
        }
    }
    if (j.contains("scenarios")) c.scenarios = detail::list_or_string(j["scenarios"], "scenarios");
    if (j.contains("techniques")) c.techniques = detail::list_or_string(j["techniques"], "techniques");
    if (j.contains("filter")) {
        if (!j["filter"].is_string()) throw config_error("\"filter\" must be \"enn\" or \"rng\"");
        c.filter = j["filter"].get<std::string>();
    }
    if (j.contains("k")) c.k = detail::positive(j["k"], "k");
    if (j.contains("knne_k")) c.knne_k = detail::positive(j["knne_k"], "knne_k");
    if (j.contains("enn_k")) c.enn_k = detail::positive(j["enn_k"], "enn_k");
    if (j.contains("pool_size")) c.pool_size = detail::positive(j["pool_size"], "pool_size");
    if (j.contains("jobs")) c.jobs = detail::positive(j["jobs"], "jobs");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw config_error("\"seed\" must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw config_error("\"out\" must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("replications")) {
        if (!j["replications"].is_array()) throw config_error("\"replications\" must be an array of integers");
        for (const auto& r : j["replications"]) {
            if (!r.is_number_integer() || r.get<int>() < 0 || r.get<int>() >= static_cast<int>(replications_per_dataset))
                throw config_error("\"replications\" entries must lie in 0..19");
            c.replications.push_back(r.get<int>());
        }
    }
    if (j.contains("keep_decisions")) {
        if (!j["keep_decisions"].is_boolean()) throw config_error("\"keep_decisions\" must be a boolean");
        c.keep_decisions = j["keep_decisions"].get<bool>();
    }
    return c;
}

inline ExperimentConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw config_error("config file not found: " + path.string());
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw config_error("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

inline ExperimentConfig apply_overrides(ExperimentConfig c, const RunOverrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.scenarios) c.scenarios = *o.scenarios;
    if (o.techniques) c.techniques = *o.techniques;
    if (o.filter) c.filter = *o.filter;
    if (o.k) c.k = *o.k;
    if (!o.datasets.empty()) {
        c.datasets = o.datasets;
        c.base_dir.clear();
    }
    return c;
}

/// Everything run needs, checked. Throws config_error before any compute.
struct ValidatedRun {
    ExperimentConfig config;
    ExperimentOptions options;
    std::vector<fs::path> dataset_paths;
    fs::path out_dir;
};

inline ValidatedRun validate(const ExperimentConfig& c) {
    ValidatedRun v;
    v.config = c;
    if (c.datasets.empty()) throw config_error("no datasets given (config \"datasets\" or positional paths)");
    if (c.out.empty()) throw config_error("no output directory given (config \"out\" or --out)");
    if (c.k < 1 || c.enn_k < 1 || c.pool_size < 1 || c.jobs < 1)
        throw config_error("k, enn_k, pool_size and jobs must be positive");
    v.options.scenarios = parse_scenarios(c.scenarios);
    v.options.techniques = parse_techniques(c.techniques);
    v.options.filter_kind = parse_filter(c.filter);
    v.options.k = c.k;
    v.options.knne_k = c.knne_k;
    v.options.enn_k = c.enn_k;
    v.options.pool_size = c.pool_size;
    v.options.seed = c.seed;
    v.options.jobs = c.jobs;
    v.options.keep_decisions = c.keep_decisions;
    v.options.replications = c.replications;
    v.dataset_paths = resolve_dataset_paths(c.datasets, c.base_dir);
    v.out_dir = c.out;
    if (fs::exists(v.out_dir) && !fs::is_directory(v.out_dir))
        throw config_error("output path exists and is not a directory: " + v.out_dir.string());
    return v;
}

inline json to_json(const ExperimentConfig& c) {
    json j{{"datasets", c.datasets}, {"scenarios", c.scenarios}, {"techniques", c.techniques},
           {"filter", c.filter},     {"k", c.k}, {"knne_k", c.knne_k}, {"enn_k", c.enn_k},
           {"pool_size", c.pool_size}, {"seed", c.seed},         {"out", c.out},
           {"jobs", c.jobs},         {"keep_decisions", c.keep_decisions}};
    if (!c.replications.empty()) j["replications"] = c.replications;
    return j;
}

// ---------------------------------------------------------------- summaries

/// Table of mean +- std AUC per dataset (rows) and technique/scenario (columns).
inline std::string summary_table(const std::vector<RunResult>& results) {
    std::vector<std::string> datasets;
    std::vector<std::pair<Technique, Scenario>> columns;
    std::map<std::pair<std::string, std::pair<Technique, Scenario>>, std::vector<double>> cells;
    for (const auto& r : results) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
        const std::pair col{r.technique, r.scenario};
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
        cells[{r.dataset, col}].push_back(r.auc);
    }
    std::sort(datasets.begin(), datasets.end());
    std::sort(columns.begin(), columns.end());
    bool one_technique = true;
    for (const auto& c : columns) one_technique = one_technique && c.first == columns.front().first;

    std::size_t name_w = 7;
    for (const auto& d : datasets) name_w = std::max(name_w, d.size());
    constexpr std::size_t cell_w = 17;
    std::ostringstream os;
    os << "AUC, mean +- std over replications";
    if (one_technique && !columns.empty()) os << " (technique " << to_string(columns.front().first) << ")";
    os << "\n";
    const auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s += std::string(w - s.size(), ' ');
        return s;
    };
    os << pad("dataset", name_w);
    for (const auto& [t, s] : columns) os << "  " << pad(one_technique ? to_string(s) : to_string(t) + "/" + to_string(s), cell_w);
    os << "\n";
    std::vector<std::vector<double>> column_means(columns.size());
    for (const auto& d : datasets) {
        os << pad(d, name_w);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const auto it = cells.find({d, columns[c]});
            if (it == cells.end()) {
                os << "  " << pad("-", cell_w);
                continue;
            }
            const double m = mean_of(it->second);
            column_means[c].push_back(m);
            os << "  " << pad(fixed(m) + " +- " + fixed(sample_std(it->second)), cell_w);
        }
        os << "\n";
    }
    os << pad("Average", name_w);
    for (const auto& m : column_means) os << "  " << pad(fixed(mean_of(m)), cell_w);
    os << "\n";
    return os.str();
}

// ---------------------------------------------------------------- run

inline int cmd_run(const RunOverrides& o, std::ostream& out, std::ostream& err) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    ValidatedRun v;
    try {
        ExperimentConfig c;
        if (o.config) c = load_config(*o.config);
        v = validate(apply_overrides(c, o));
    } catch (const error& e) {
        err << "firedes run: " << e.what() << "\n";
        return exit_code::usage;
    }

    std::vector<Dataset> datasets;
    json dataset_entries = json::array();
    std::vector<DatasetFailure> load_failures;
    for (const auto& p : v.dataset_paths) {
        try {
            datasets.push_back(load_keel(p.string()));
        } catch (const error& e) {
            load_failures.push_back({p.stem().string(), e.what()});
            err << "firedes run: skipping " << p.string() << ": " << e.what() << "\n";
        }
    }
    const auto t1 = clock::now();

    ExperimentOutcome outcome;
    try {
        outcome = run_experiment(datasets, v.options);
    } catch (const std::exception& e) {
        err << "firedes run: " << e.what() << "\n";
        return exit_code::runtime;
    }
    const auto t2 = clock::now();
    for (const auto& f : outcome.failures) err << "firedes run: dataset " << f.dataset << " failed: " << f.message << "\n";

    std::set<std::string> failed;
    for (const auto& f : outcome.failures) failed.insert(f.dataset);
    for (const auto& d : datasets) {
        json e{{"name", d.name()},
               {"samples", d.size()},
               {"features", d.n_features()},
               {"imbalance_ratio", d.imbalance_ratio()},
               {"status", failed.count(d.name()) ? "failed" : "ok"}};
        for (const auto& f : outcome.failures)
            if (f.dataset == d.name()) e["error"] = f.message;
        dataset_entries.push_back(e);
    }
    for (const auto& f : load_failures)
        dataset_entries.push_back({{"name", f.dataset}, {"status", "failed"}, {"error", f.message}});

    const std::size_t succeeded = datasets.size() - failed.size();
    try {
        fs::create_directories(v.out_dir);
        write_text(v.out_dir / "results.json", results_document(outcome.results).dump(2) + "\n");
        write_text(v.out_dir / "summary.txt", summary_table(outcome.results));
        const auto seconds = [](auto a, auto b) { return std::chrono::duration<double>(b - a).count(); };
        json manifest{{"tool", "firedes"},
                      {"version", version},
                      {"seed", v.config.seed},
                      {"config", to_json(v.config)},
                      {"datasets", dataset_entries},
                      {"records", outcome.results.size()},
                      {"timings", {{"load_seconds", seconds(t0, t1)},
                                   {"run_seconds", seconds(t1, t2)},
                                   {"total_seconds", seconds(t0, clock::now())}}},
                      {"build", {{"compiler", __VERSION__},
                                 {"cxx_standard", __cplusplus},
                                 {"boost", BOOST_LIB_VERSION},
                                 {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                       std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
        write_text(v.out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "firedes run: " << e.what() << "\n";
        return exit_code::runtime;
    }

    out << summary_table(outcome.results);
    out << outcome.results.size() << " records from " << succeeded << " of " << v.dataset_paths.size()
        << " datasets written to " << v.out_dir.string() << "\n";
    return succeeded == 0 ? exit_code::runtime : exit_code::ok;
}

// ---------------------------------------------------------------- filter

struct FilterArgs {
    std::string dataset;
    std::string filter = "enn";
    std::size_t k = default_enn_k;
    std::optional<std::string> out;
};

inline json class_counts(const Dataset& d) {
    json j = json::object();
    for (Label y = 0; y < static_cast<Label>(num_classes); ++y) j[d.class_names()[static_cast<std::size_t>(y)]] = d.class_count(y);
    return j;
}

/// Runs one filter over the whole file (features as stored, no rescaling) and
/// prints the removal report as JSON.
inline int cmd_filter(const FilterArgs& a, std::ostream& out, std::ostream& err) {
    FilterKind kind{};
    Dataset data;
    try {
        kind = parse_filter(a.filter);
        if (a.k < 1) throw config_error("--k must be positive");
        if (!fs::is_regular_file(a.dataset)) throw config_error("dataset not found: " + a.dataset);
        data = load_keel(a.dataset);
    } catch (const error& e) {
        err << "firedes filter: " << e.what() << "\n";
        return exit_code::usage;
    }
    try {
        if (!data.has_both_classes())
            throw contract_error("dataset '" + data.name() + "' holds a single class; nothing to filter against");
        const auto r = apply_filter(data, kind, a.k);
        json report{{"dataset", data.name()},
                    {"filter", to_string(kind)},
                    {"before", {{"total", data.size()}, {"classes", class_counts(data)}}},
                    {"after", {{"total", r.data.size()}, {"classes", class_counts(r.data)}}},
                    {"minority", data.class_names()[static_cast<std::size_t>(data.minority_label())]},
                    {"removed", r.removed}};
        if (kind == FilterKind::enn) report["k"] = a.k;
        const auto text = report.dump(2) + "\n";
        if (a.out) {
            fs::create_directories(*a.out);
            write_text(fs::path(*a.out) / "filter_report.json", text);
        }
        out << text;
    } catch (const std::exception& e) {
        err << "firedes filter: " << e.what() << "\n";
        return exit_code::runtime;
    }
    return exit_code::ok;
}

// ---------------------------------------------------------------- stats

enum class GroupBy { scenario, technique, scenario_technique };

inline GroupBy group_by_from_string(const std::string& s) {
    if (s == "scenario") return GroupBy::scenario;
    if (s == "technique") return GroupBy::technique;
    if (s == "scenario_technique") return GroupBy::scenario_technique;
    throw config_error("unknown grouping '" + s + "' (expected scenario, technique or scenario_technique)");
}

inline std::string to_string(GroupBy g) {
    switch (g) {
        case GroupBy::scenario: return "scenario";
        case GroupBy::technique: return "technique";
        case GroupBy::scenario_technique: return "scenario_technique";
    }
    return "?";
}

/// Mean AUC over replications, arranged as blocks x methods.
/// Throws config_error when blocks do not all carry the same methods.
inline stats::RankTable build_rank_table(const std::vector<RunResult>& results, GroupBy by) {
    using MethodKey = std::pair<int, int>;  // sortable (technique, scenario) projection
    std::map<std::string, std::map<MethodKey, std::vector<double>>> cells;
    std::map<MethodKey, std::string> method_names;
    for (const auto& r : results) {
        std::string block;
        MethodKey key;
        std::string name;
        switch (by) {
            case GroupBy::scenario:
                block = r.dataset + "/" + to_string(r.technique);
                key = {0, static_cast<int>(r.scenario)};
                name = to_string(r.scenario);
                break;
            case GroupBy::technique:
                block = r.dataset + "/" + to_string(r.scenario);
                key = {static_cast<int>(r.technique), 0};
                name = to_string(r.technique);
                break;
            case GroupBy::scenario_technique:
                block = r.dataset;
                key = {static_cast<int>(r.technique), static_cast<int>(r.scenario)};
                name = to_string(r.technique) + "-" + to_string(r.scenario);
                break;
        }
        cells[block][key].push_back(r.auc);
        method_names[key] = name;
    }
    if (cells.empty()) throw config_error("no results to compare");

    std::vector<MethodKey> keys;
    for (const auto& [k, _] : method_names) keys.push_back(k);
    std::vector<std::string> methods;
    for (const auto& k : keys) methods.push_back(method_names[k]);
    std::vector<std::string> blocks;
    std::vector<std::vector<double>> scores;
    for (const auto& [block, row] : cells) {
        if (row.size() != keys.size()) {
            std::string missing;
            for (const auto& k : keys)
                if (!row.count(k)) missing += (missing.empty() ? "" : ", ") + method_names[k];
            throw config_error("block " + block + " lacks method(s) " + missing);
        }
        blocks.push_back(block);
        std::vector<double> s;
        for (const auto& k : keys) s.push_back(mean_of(row.at(k)));
        scores.push_back(std::move(s));
    }
    return stats::make_rank_table(std::move(methods), std::move(blocks), std::move(scores));
}

struct StatsArgs {
    std::string results;
    std::string by = "scenario";
    double alpha = 0.10;
    std::optional<std::string> out;
    std::optional<std::string> scenarios;
    std::optional<std::string> techniques;
    std::string compare;  // "A:B,C:D"; empty compares the best-ranked method with every other
};

inline std::vector<RunResult> load_results(const std::string& path) {
    if (!fs::is_regular_file(path)) throw config_error("results file not found: " + path);
    try {
        return results_from_document(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw config_error("malformed results file " + path + ": " + e.what());
    } catch (const contract_error& e) {
        throw config_error("malformed results file " + path + ": " + e.what());
    }
}

inline std::vector<RunResult> select_results(std::vector<RunResult> results, const std::optional<std::string>& scenarios,
                                              const std::optional<std::string>& techniques) {
    if (scenarios) {
        const auto keep = parse_scenarios(*scenarios);
        std::erase_if(results, [&](const RunResult& r) {
            return std::find(keep.begin(), keep.end(), r.scenario) == keep.end();
        });
    }
    if (techniques) {
        const auto keep = parse_techniques(*techniques);
        std::erase_if(results, [&](const RunResult& r) {
            return std::find(keep.begin(), keep.end(), r.technique) == keep.end();
        });
    }
    return results;
}

inline json stats_report(const stats::RankTable& table, GroupBy by, double alpha,
                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    const auto avg = table.average_ranks();
    const auto fr = stats::friedman(table, alpha);
    const double cd = stats::nemenyi_cd(table.n_methods(), table.n_blocks(), alpha);
    const auto layout = stats::cd_layout(table.methods, avg, cd);

    json ranks = json::object();
    for (std::size_t j = 0; j < table.n_methods(); ++j) ranks[table.methods[j]] = avg[j];
    json cliques = json::array();
    for (const auto& [a, b] : layout.cliques)
        cliques.push_back(std::vector<std::string>(layout.names.begin() + static_cast<std::ptrdiff_t>(a),
                                                   layout.names.begin() + static_cast<std::ptrdiff_t>(b) + 1));

    json pairwise = json::array();
    for (const auto& [a, b] : pairs) {
        std::vector<double> sa, sb;
        for (const auto& row : table.scores) {
            sa.push_back(row[a]);
            sb.push_back(row[b]);
        }
        json p{{"a", table.methods[a]}, {"b", table.methods[b]}};
        try {
            p["wilcoxon"] = stats::to_json(stats::wilcoxon_signed_rank(sa, sb, alpha));
        } catch (const contract_error& e) {
            p["wilcoxon"] = {{"skipped", e.what()}};
        }
        const auto st = stats::sign_test(sa, sb, alpha);
        p["sign_test"] = {{"wins", st.wins},
                          {"ties", st.ties},
                          {"losses", st.losses},
                          {"score", st.score()},
                          {"critical", {{"0.10", stats::sign_test_critical(sa.size(), 0.10)},
                                        {"0.05", stats::sign_test_critical(sa.size(), 0.05)},
                                        {"0.01", stats::sign_test_critical(sa.size(), 0.01)}}},
                          {"reject", st.reject}};
        pairwise.push_back(std::move(p));
    }
    return {{"grouping", to_string(by)},
            {"alpha", alpha},
            {"n_blocks", table.n_blocks()},
            {"methods", table.methods},
            {"average_ranks", ranks},
            {"friedman", stats::to_json(fr)},
            {"nemenyi", {{"cd", cd}, {"k", table.n_methods()}, {"n_blocks", table.n_blocks()}}},
            {"cliques", cliques},
            {"pairwise", pairwise}};
}

inline int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
    stats::RankTable table;
    GroupBy by{};
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    try {
        by = group_by_from_string(a.by);
        if (!(a.alpha == 0.10 || a.alpha == 0.05)) throw config_error("--alpha must be 0.10 or 0.05");
        table = build_rank_table(select_results(load_results(a.results), a.scenarios, a.techniques), by);
        if (table.n_methods() < 2 || table.n_blocks() < 2)
            throw config_error("need at least 2 methods and 2 blocks, got " + std::to_string(table.n_methods()) +
                               " methods over " + std::to_string(table.n_blocks()) + " blocks");
        if (table.n_methods() > 20)
            throw config_error(std::to_string(table.n_methods()) +
                               " methods; the critical-difference table covers at most 20");
        const auto index_of = [&](const std::string& m) {
            const auto it = std::find(table.methods.begin(), table.methods.end(), m);
            if (it == table.methods.end()) throw config_error("method '" + m + "' not present in results");
            return static_cast<std::size_t>(it - table.methods.begin());
        };
        if (a.compare.empty()) {
            const auto avg = table.average_ranks();
            const auto best = static_cast<std::size_t>(std::min_element(avg.begin(), avg.end()) - avg.begin());
            for (std::size_t j = 0; j < table.n_methods(); ++j)
                if (j != best) pairs.emplace_back(best, j);
        } else {
            for (const auto& item : split_list(a.compare)) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw config_error("comparison '" + item + "' is not of the form A:B");
                pairs.emplace_back(index_of(item.substr(0, colon)), index_of(item.substr(colon + 1)));
            }
        }
    } catch (const error& e) {
        err << "firedes stats: " << e.what() << "\n";
        return exit_code::usage;
    }

    try {
        const auto report = stats_report(table, by, a.alpha, pairs);
        const double cd = report["nemenyi"]["cd"].get<double>();
        const auto avg = table.average_ranks();
        const auto svg = stats::emit_cd_diagram_svg(table.methods, avg, cd);
        const auto txt = stats::emit_cd_diagram_text(table.methods, avg, cd);
        if (a.out) {
            fs::create_directories(*a.out);
            write_text(fs::path(*a.out) / "cd_diagram.svg", svg);
            write_text(fs::path(*a.out) / "cd_diagram.txt", txt);
            write_text(fs::path(*a.out) / "stats_report.json", report.dump(2) + "\n");
        }

        const auto& fr = report["friedman"];
        out << "Friedman over " << table.n_blocks() << " blocks, " << table.n_methods()
            << " methods: chi2 = " << fixed(fr["statistic"].get<double>()) << ", p = " << fr["p_value"].get<double>()
            << " (log10 p = " << fixed(fr["log10_p"].get<double>(), 2) << ")\n";
        out << "Nemenyi CD (alpha = " << fixed(a.alpha, 2) << ") = " << fixed(cd) << "\n\n" << txt << "\n";
        out << "Sign test critical wins for n = " << table.n_blocks() << ": "
            << fixed(stats::sign_test_critical(table.n_blocks(), 0.10), 2) << " / "
            << fixed(stats::sign_test_critical(table.n_blocks(), 0.05), 2) << " / "
            << fixed(stats::sign_test_critical(table.n_blocks(), 0.01), 2) << " (alpha 0.10 / 0.05 / 0.01)\n";
        for (const auto& p : report["pairwise"]) {
            out << p["a"].get<std::string>() << " vs " << p["b"].get<std::string>() << ": ";
            const auto& w = p["wilcoxon"];
            if (w.contains("skipped"))
                out << "Wilcoxon skipped (" << w["skipped"].get<std::string>() << ")";
            else
                out << "Wilcoxon p = " << fixed(w["p_value"].get<double>()) << (w["reject"].get<bool>() ? " *" : "");
            const auto& s = p["sign_test"];
            out << ", sign test " << s["wins"].get<std::size_t>() << "/" << s["ties"].get<std::size_t>() << "/"
                << s["losses"].get<std::size_t>() << (s["reject"].get<bool>() ? " *" : "") << "\n";
        }
    } catch (const std::exception& e) {
        err << "firedes stats: " << e.what() << "\n";
        return exit_code::runtime;
    }
    return exit_code::ok;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string results;
    std::string compare = "VIII:I";
    double alpha = 0.10;
    std::optional<std::string> out;
};

/// Per-dataset table, gains over Scenario I and paired t-tests for one
/// scenario pair, per technique.
inline int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<RunResult> results;
    Scenario sa{}, sb{};
    try {
        results = load_results(a.results);
        const auto colon = a.compare.find(':');
        if (colon == std::string::npos) throw config_error("--compare must look like VIII:I");
        sa = parse_scenarios(a.compare.substr(0, colon)).at(0);
        sb = parse_scenarios(a.compare.substr(colon + 1)).at(0);
        if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw config_error("--alpha must lie in (0, 1)");
    } catch (const error& e) {
        err << "firedes report: " << e.what() << "\n";
        return exit_code::usage;
    }

    std::ostringstream os;
    os << summary_table(results) << "\n";

    std::map<std::pair<Technique, Scenario>, std::map<std::string, std::vector<double>>> by;
    std::set<Technique> techniques;
    std::set<Scenario> scenarios;
    for (const auto& r : results) {
        by[{r.technique, r.scenario}][r.dataset].push_back(r.auc);
        techniques.insert(r.technique);
        scenarios.insert(r.scenario);
    }

    for (auto t : techniques) {
        if (scenarios.count(Scenario::I)) {
            os << "Mean AUC gain over Scenario I (" << to_string(t) << "):";
            const auto& base = by[{t, Scenario::I}];
            for (auto s : scenarios) {
                if (s == Scenario::I) continue;
                std::vector<double> gains;
                for (const auto& [d, v] : by[{t, s}])
                    if (base.count(d)) gains.push_back(mean_of(v) - mean_of(base.at(d)));
                os << "  " << to_string(s) << " " << (mean_of(gains) >= 0 ? "+" : "") << fixed(mean_of(gains));
            }
            os << "\n";
        }
        const auto& ra = by[{t, sa}];
        const auto& rb = by[{t, sb}];
        if (ra.empty() || rb.empty()) continue;
        os << "\nPaired t-test per dataset, " << to_string(t) << " " << to_string(sa) << " vs " << to_string(sb)
           << " (alpha = " << fixed(a.alpha, 2) << "):\n";
        std::size_t better = 0, worse = 0;
        for (const auto& [d, va] : ra) {
            if (!rb.count(d)) continue;
            const auto& vb = rb.at(d);
            os << "  " << d << ": " << fixed(mean_of(va)) << " vs " << fixed(mean_of(vb));
            if (va.size() != vb.size() || va.size() < 2) {
                os << "  (unpaired)\n";
                continue;
            }
            const auto tt = stats::paired_t_test(va, vb, a.alpha);
            if (tt.degenerate) {
                os << "  (no variation)\n";
                continue;
            }
            os << "  t = " << fixed(tt.statistic, 3) << ", p = " << fixed(tt.p_value);
            if (tt.reject) {
                os << (tt.statistic > 0 ? "  better" : "  worse");
                (tt.statistic > 0 ? better : worse)++;
            }
            os << "\n";
        }
        os << "  significantly better on " << better << ", worse on " << worse << " dataset(s)\n";
    }

    try {
        if (a.out) {
            fs::create_directories(*a.out);
            write_text(fs::path(*a.out) / "report.txt", os.str());
        }
    } catch (const std::exception& e) {
        err << "firedes report: " << e.what() << "\n";
        return exit_code::runtime;
    }
    out << os.str();
    return exit_code::ok;
}

// ---------------------------------------------------------------- entry point

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"FIRE-DES++ experiments: dynamic ensemble selection with filtering and frienemy pruning"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    RunOverrides run;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment protocol and write results");
    run_cmd->add_option("--config", run.config, "JSON experiment config");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--jobs", run.jobs, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--scenarios", run.scenarios, "Scenarios, e.g. I,IV,VIII or all");
    run_cmd->add_option("--techniques", run.techniques, "Techniques, e.g. KNE,OLA or all");
    run_cmd->add_option("--filter", run.filter, "Filter for scenarios that use one")
        ->check(CLI::IsMember({"enn", "rng"}));
    run_cmd->add_option("--k", run.k, "Region of competence size")->check(CLI::PositiveNumber);
    run_cmd->add_option("datasets", run.datasets, "Dataset files or directories (override the config)");

    FilterArgs filter;
    auto* filter_cmd = app.add_subcommand("filter", "Filter one dataset and print the removal report");
    filter_cmd->add_option("dataset", filter.dataset, "KEEL .dat file")->required();
    filter_cmd->add_option("--filter", filter.filter, "enn or rng")->check(CLI::IsMember({"enn", "rng"}));
    filter_cmd->add_option("--k", filter.k, "ENN neighbourhood size")->check(CLI::PositiveNumber);
    filter_cmd->add_option("--out", filter.out, "Also write filter_report.json here");
    std::optional<std::uint64_t> unused_seed;
    filter_cmd->add_option("--seed", unused_seed, "Accepted for uniformity; filtering is deterministic");

    StatsArgs st;
    auto* stats_cmd = app.add_subcommand("stats", "Friedman, Nemenyi, Wilcoxon and sign tests over results.json");
    stats_cmd->add_option("results", st.results, "results.json from run")->required();
    stats_cmd->add_option("--by", st.by, "Methods to compare")
        ->check(CLI::IsMember({"scenario", "technique", "scenario_technique"}));
    stats_cmd->add_option("--alpha", st.alpha, "Significance level (0.10 or 0.05)");
    stats_cmd->add_option("--out", st.out, "Directory for cd_diagram.svg, cd_diagram.txt, stats_report.json");
    stats_cmd->add_option("--scenarios", st.scenarios, "Only these scenarios");
    stats_cmd->add_option("--techniques", st.techniques, "Only these techniques");
    stats_cmd->add_option("--compare", st.compare, "Pairs to test, e.g. VIII:I,VIII:IV");

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "AUC tables and per-dataset paired t-tests");
    report_cmd->add_option("results", rep.results, "results.json from run")->required();
    report_cmd->add_option("--compare", rep.compare, "Scenario pair, e.g. VIII:I");
    report_cmd->add_option("--alpha", rep.alpha, "Significance level");
    report_cmd->add_option("--out", rep.out, "Also write report.txt here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    if (*run_cmd) return cmd_run(run, out, err);
    if (*filter_cmd) return cmd_filter(filter, out, err);
    if (*stats_cmd) return cmd_stats(st, out, err);
    return cmd_report(rep, out, err);
}

} // namespace firedes::cli

#endif // FIREDES_CLI_HPP
