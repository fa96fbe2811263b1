#ifndef FIREDES_STATS_HPP
#define FIREDES_STATS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"

#include "firedes/error.hpp"

namespace firedes::stats {

struct TestReport {
    double statistic = 0.0;
    double p_value = 1.0;
    double log10_p = 0.0;  // kept separately because p underflows for huge statistics
    double alpha = 0.10;
    bool reject = false;
    bool degenerate = false;
    std::size_t n = 0;
};

inline nlohmann::json to_json(const TestReport& r) {
    return {{"statistic", r.statistic}, {"p_value", r.p_value},     {"log10_p", r.log10_p}, {"alpha", r.alpha},
            {"reject", r.reject},       {"degenerate", r.degenerate}, {"n", r.n}};
}

namespace detail {

inline TestReport degenerate_report(double alpha, std::size_t n) {
    TestReport r;
    r.alpha = alpha;
    r.n = n;
    r.degenerate = true;
    return r;
}

inline void finish(TestReport& r) {
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    if (r.p_value > 0.0) r.log10_p = std::log10(r.p_value);
    r.reject = r.p_value < r.alpha;
}

/// ln Q(a, x), the regularised upper incomplete gamma, via its continued
/// fraction. Only used where Q itself underflows (x far beyond a).
inline double log_gamma_q_tail(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

inline double chi_squared_sf(double stat, double df) {
    if (stat <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

inline double log10_chi_squared_sf(double stat, double df) {
    const double p = chi_squared_sf(stat, df);
    if (p > 1e-290) return std::log10(p);
    return log_gamma_q_tail(df / 2.0, stat / 2.0) / std::log(10.0);
}

inline double normal_sf(double z) {
    return boost::math::cdf(boost::math::complement(boost::math::normal(), z));
}

} // namespace detail

/// Ranks 1..k with 1 for the highest score; tied scores share the mean rank.
inline std::vector<double> rank_descending(const std::vector<double>& scores) {
    const std::size_t k = scores.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<double> ranks(k);
    for (std::size_t i = 0; i < k;) {
        std::size_t j = i;
        while (j < k && scores[order[j]] == scores[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mean_rank;
        i = j;
    }
    return ranks;
}

/// Scores of k methods over N blocks (datasets, or dataset x technique rows).
struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::string> blocks;
    std::vector<std::vector<double>> scores;  // [block][method]
    std::vector<std::vector<double>> ranks;   // [block][method]

    std::size_t n_methods() const noexcept { return methods.size(); }
    std::size_t n_blocks() const noexcept { return blocks.size(); }

    std::vector<double> average_ranks() const {
        std::vector<double> avg(n_methods(), 0.0);
        for (const auto& row : ranks)
            for (std::size_t j = 0; j < row.size(); ++j) avg[j] += row[j];
        for (auto& a : avg) a /= static_cast<double>(n_blocks());
        return avg;
    }
};

inline RankTable make_rank_table(std::vector<std::string> methods, std::vector<std::string> blocks,
                                 std::vector<std::vector<double>> scores) {
    if (scores.size() != blocks.size()) throw contract_error("rank table: one score row per block required");
    for (const auto& row : scores)
        if (row.size() != methods.size()) throw contract_error("rank table: every block must score every method");
    RankTable t{std::move(methods), std::move(blocks), std::move(scores), {}};
    for (const auto& row : t.scores) t.ranks.push_back(rank_descending(row));
    return t;
}

enum class WilcoxonMode { automatic, exact, normal };

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
/// dropped and tied |differences| share mean ranks. Exact null distribution for
/// n <= 25 (automatic mode), normal approximation with continuity correction above.
inline TestReport wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                       double alpha = 0.10, WilcoxonMode mode = WilcoxonMode::automatic) {
    if (a.size() != b.size()) throw contract_error("wilcoxon: samples differ in length");
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diff.push_back(a[i] - b[i]);
    const std::size_t n = diff.size();
    if (n == 0) return detail::degenerate_report(alpha, 0);
    if (n < 6) throw contract_error("wilcoxon: need at least 6 non-zero differences, got " + std::to_string(n));

    std::vector<double> magnitude(n);
    for (std::size_t i = 0; i < n; ++i) magnitude[i] = -std::fabs(diff[i]);  // ascending |d| -> rank 1
    const auto ranks = rank_descending(magnitude);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (diff[i] > 0) w_plus += ranks[i];
    const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;

    TestReport r;
    r.alpha = alpha;
    r.n = n;
    r.statistic = std::min(w_plus, total - w_plus);

    const bool exact = mode == WilcoxonMode::exact || (mode == WilcoxonMode::automatic && n <= 25);
    if (exact) {
        // Null distribution of 2*W+ by dynamic programming over sign patterns;
        // doubled mean ranks are integers even with ties.
        std::vector<int> doubled(n);
        int max_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
            max_sum += doubled[i];
        }
        std::vector<double> count(static_cast<std::size_t>(max_sum) + 1, 0.0);
        count[0] = 1.0;
        int reach = 0;
        for (int d : doubled) {
            for (int s = reach; s >= 0; --s)
                if (count[static_cast<std::size_t>(s)] != 0.0) count[static_cast<std::size_t>(s + d)] += count[static_cast<std::size_t>(s)];
            reach += d;
        }
        const int observed = static_cast<int>(std::lround(2.0 * w_plus));
        double lower = 0.0;
        double upper = 0.0;
        double all = 0.0;
        for (int s = 0; s <= max_sum; ++s) {
            const double c = count[static_cast<std::size_t>(s)];
            all += c;
            if (s <= observed) lower += c;
            if (s >= observed) upper += c;
        }
        r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    } else {
        std::vector<double> sorted(magnitude);
        std::sort(sorted.begin(), sorted.end());
        double tie_term = 0.0;
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j < n && sorted[j] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i);
            tie_term += t * t * t - t;
            i = j;
        }
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
        const double z = std::max(0.0, std::fabs(w_plus - mean) - 0.5) / std::sqrt(var);
        r.p_value = std::min(1.0, 2.0 * detail::normal_sf(z));
    }
    detail::finish(r);
    return r;
}

/// Upper-alpha standard normal quantile. The three customary levels use the
/// conventional one-tailed table values (1.28, 1.645, 2.33); any other level
/// uses the exact quantile.
inline double z_critical(double alpha, bool tabulated = true) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw contract_error("z_critical: alpha must lie in (0, 0.5)");
    if (tabulated) {
        if (std::fabs(alpha - 0.10) < 1e-12) return 1.28;
        if (std::fabs(alpha - 0.05) < 1e-12) return 1.645;
        if (std::fabs(alpha - 0.01) < 1e-12) return 2.33;
    }
    return boost::math::quantile(boost::math::complement(boost::math::normal(), alpha));
}

/// Wins (ties counting one half) needed out of n_exp comparisons for the sign
/// test to reject at level alpha: n/2 + z_alpha * sqrt(n) / 2.
inline double sign_test_critical(std::size_t n_exp, double alpha, bool tabulated = true) {
    if (n_exp == 0) throw contract_error("sign test: n_exp must be at least 1");
    const double n = static_cast<double>(n_exp);
    return n / 2.0 + z_critical(alpha, tabulated) * std::sqrt(n) / 2.0;
}

struct SignTestResult {
    std::size_t wins = 0;
    std::size_t ties = 0;
    std::size_t losses = 0;
    double critical = 0.0;
    double alpha = 0.10;
    bool reject = false;

    double score() const { return static_cast<double>(wins) + 0.5 * static_cast<double>(ties); }
};

inline SignTestResult sign_test(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.10) {
    if (a.size() != b.size()) throw contract_error("sign test: samples differ in length");
    SignTestResult r;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i])
            ++r.wins;
        else if (a[i] < b[i])
            ++r.losses;
        else
            ++r.ties;
    }
    r.alpha = alpha;
    r.critical = sign_test_critical(a.size(), alpha);
    r.reject = r.score() >= r.critical;
    return r;
}

/// Friedman test on a rank table. The statistic is
/// 12N / (k(k+1)) * (sum_j R_j^2 - k(k+1)^2 / 4) over average ranks R_j.
inline TestReport friedman(const RankTable& table, double alpha = 0.10) {
    const std::size_t n = table.n_blocks();
    const std::size_t k = table.n_methods();
    if (n < 2 || k < 2)
        throw contract_error("friedman: need at least 2 blocks and 2 methods (got " + std::to_string(n) + " x " +
                             std::to_string(k) + ")");
    const auto avg = table.average_ranks();
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    double sum_sq = 0.0;
    for (double r : avg) sum_sq += r * r;
    TestReport r;
    r.alpha = alpha;
    r.n = n;
    r.statistic = std::max(0.0, 12.0 * nn / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0));
    bool constant = true;
    for (const auto& row : table.scores)
        constant = constant && std::all_of(row.begin(), row.end(), [&](double s) { return s == row.front(); });
    if (constant) {
        auto d = detail::degenerate_report(alpha, n);
        d.statistic = r.statistic;
        return d;
    }
    r.p_value = detail::chi_squared_sf(r.statistic, kk - 1.0);
    r.reject = r.p_value < alpha;
    r.log10_p = detail::log10_chi_squared_sf(r.statistic, kk - 1.0);
    return r;
}

/// Two-tailed studentized range quantiles divided by sqrt(2), k = 2..20.
inline constexpr std::array<double, 19> nemenyi_q_010{
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606, 2.919889, 2.977768,
    3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723, 3.261461, 3.291224, 3.319233};
inline constexpr std::array<double, 19> nemenyi_q_005{
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730, 3.163684, 3.218654,
    3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073, 3.543799};

inline double nemenyi_q(std::size_t k, double alpha) {
    if (k < 2 || k > 20) throw contract_error("nemenyi: k = " + std::to_string(k) + " outside the table (2..20)");
    if (std::fabs(alpha - 0.10) < 1e-12) return nemenyi_q_010[k - 2];
    if (std::fabs(alpha - 0.05) < 1e-12) return nemenyi_q_005[k - 2];
    throw contract_error("nemenyi: alpha must be 0.05 or 0.10");
}

/// Critical difference of average ranks for the Nemenyi post-hoc test.
inline double nemenyi_cd(std::size_t k, std::size_t n_blocks, double alpha = 0.10) {
    if (n_blocks == 0) throw contract_error("nemenyi: n_blocks must be positive");
    const double kk = static_cast<double>(k);
    return nemenyi_q(k, alpha) * std::sqrt(kk * (kk + 1.0) / (6.0 * static_cast<double>(n_blocks)));
}

/// Two-sided paired t-test with n - 1 degrees of freedom.
inline TestReport paired_t_test(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.10) {
    if (a.size() != b.size()) throw contract_error("t-test: samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw contract_error("t-test: need at least 2 pairs");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = a[i] - b[i] - mean;
        ss += e * e;
    }
    const double var = ss / static_cast<double>(n - 1);
    if (!(var > 0.0)) return detail::degenerate_report(alpha, n);
    TestReport r;
    r.alpha = alpha;
    r.n = n;
    r.statistic = mean / std::sqrt(var / static_cast<double>(n));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.statistic)));
    detail::finish(r);
    return r;
}

/// Maximal groups of methods whose average ranks all lie within `cd` of each
/// other, as [first, last] positions into the rank-sorted order. Groups of one
/// method are omitted.
inline std::vector<std::pair<std::size_t, std::size_t>> cd_cliques(const std::vector<double>& sorted_ranks,
                                                                   double cd) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t k = sorted_ranks.size();
    std::size_t last_end = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i;
        while (j + 1 < k && sorted_ranks[j + 1] - sorted_ranks[i] <= cd) ++j;
        if (j > i && (out.empty() || j > last_end)) {
            out.emplace_back(i, j);
            last_end = j;
        }
    }
    return out;
}

struct CdLayout {
    std::vector<std::string> names;  // sorted by average rank, best first
    std::vector<double> ranks;
    std::vector<std::pair<std::size_t, std::size_t>> cliques;
    double cd = 0.0;
    std::size_t k = 0;
};

inline CdLayout cd_layout(const std::vector<std::string>& names, const std::vector<double>& average_ranks, double cd) {
    if (names.size() != average_ranks.size()) throw contract_error("cd diagram: names and ranks differ in length");
    const std::size_t k = names.size();
    for (double r : average_ranks)
        if (r < 1.0 - 1e-9 || r > static_cast<double>(k) + 1e-9)
            throw contract_error("cd diagram: average ranks must lie in [1, k]");
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return average_ranks[a] < average_ranks[b]; });
    CdLayout l;
    l.cd = cd;
    l.k = k;
    for (std::size_t i : order) {
        l.names.push_back(names[i]);
        l.ranks.push_back(average_ranks[i]);
    }
    l.cliques = cd_cliques(l.ranks, cd);
    return l;
}

namespace detail {

inline std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(precision);
    os << v;
    return os.str();
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace detail

/// Critical-difference diagram as an SVG 1.1 document. Rank 1 is on the left;
/// the better half of the methods is labelled on the left, the rest on the right.
inline std::string emit_cd_diagram_svg(const std::vector<std::string>& names, const std::vector<double>& average_ranks,
                                       double cd) {
    const auto l = cd_layout(names, average_ranks, cd);
    const double width = 800.0;
    const double left = 150.0;
    const double right = width - 150.0;
    const double axis_y = 80.0;
    const double k = static_cast<double>(std::max<std::size_t>(l.k, 2));
    const auto x_of = [&](double rank) { return left + (rank - 1.0) / (k - 1.0) * (right - left); };
    const std::size_t half = (l.k + 1) / 2;
    const double row_h = 22.0;
    const double clique_top = axis_y + 18.0;
    const double labels_top = clique_top + 10.0 * static_cast<double>(l.cliques.size()) + 16.0;
    const double height = labels_top + row_h * static_cast<double>(std::max(half, l.k - half)) + 20.0;

    using detail::fmt;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width, 0) << "\" height=\""
       << fmt(height, 0) << "\" viewBox=\"0 0 " << fmt(width, 0) << ' ' << fmt(height, 0) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<g font-family=\"sans-serif\" font-size=\"13\" stroke=\"black\" stroke-width=\"1\">\n";

    // critical difference bar
    os << "<line class=\"cd\" x1=\"" << fmt(left) << "\" y1=\"20\" x2=\"" << fmt(left + cd / (k - 1.0) * (right - left))
       << "\" y2=\"20\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << fmt(left) << "\" y=\"14\" stroke=\"none\">CD = " << fmt(cd) << "</text>\n";

    // axis with integer ticks
    os << "<line class=\"axis\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(axis_y) << "\" x2=\"" << fmt(right)
       << "\" y2=\"" << fmt(axis_y) << "\"/>\n";
    for (std::size_t t = 1; t <= l.k; ++t) {
        const double x = x_of(static_cast<double>(t));
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(axis_y - 8) << "\" x2=\"" << fmt(x) << "\" y2=\""
           << fmt(axis_y) << "\"/>\n"
           << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(axis_y - 12) << "\" text-anchor=\"middle\" stroke=\"none\">" << t
           << "</text>\n";
    }

    for (std::size_t c = 0; c < l.cliques.size(); ++c) {
        const double y = clique_top + 10.0 * static_cast<double>(c);
        os << "<line class=\"clique\" x1=\"" << fmt(x_of(l.ranks[l.cliques[c].first]) - 4) << "\" y1=\"" << fmt(y)
           << "\" x2=\"" << fmt(x_of(l.ranks[l.cliques[c].second]) + 4) << "\" y2=\"" << fmt(y)
           << "\" stroke-width=\"3\"/>\n";
    }

    for (std::size_t i = 0; i < l.k; ++i) {
        const bool on_left = i < half;
        const std::size_t row = on_left ? i : l.k - 1 - i;
        const double x = x_of(l.ranks[i]);
        const double y = labels_top + row_h * static_cast<double>(row);
        const double end_x = on_left ? left - 10.0 : right + 10.0;
        os << "<polyline class=\"method\" fill=\"none\" points=\"" << fmt(x) << ',' << fmt(axis_y) << ' ' << fmt(x)
           << ',' << fmt(y) << ' ' << fmt(end_x) << ',' << fmt(y) << "\"/>\n"
           << "<text x=\"" << fmt(on_left ? end_x - 4 : end_x + 4) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\""
           << (on_left ? "end" : "start") << "\" stroke=\"none\">" << detail::xml_escape(l.names[i]) << " ("
           << fmt(l.ranks[i]) << ")</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

/// Plain-text rendering of the same diagram.
inline std::string emit_cd_diagram_text(const std::vector<std::string>& names,
                                        const std::vector<double>& average_ranks, double cd) {
    const auto l = cd_layout(names, average_ranks, cd);
    constexpr std::size_t cols = 61;
    const double k = static_cast<double>(std::max<std::size_t>(l.k, 2));
    const auto col_of = [&](double r) {
        return static_cast<std::size_t>(std::lround((r - 1.0) / (k - 1.0) * static_cast<double>(cols - 1)));
    };
    std::ostringstream os;
    os << "Critical difference (CD) = " << detail::fmt(cd) << "\n";
    std::string axis(cols, '-');
    std::string ticks(cols, ' ');
    for (std::size_t t = 1; t <= l.k; ++t) {
        axis[col_of(static_cast<double>(t))] = '+';
        const auto label = std::to_string(t);
        const auto c = col_of(static_cast<double>(t));
        for (std::size_t i = 0; i < label.size() && c + i < cols; ++i) ticks[c + i] = label[i];
    }
    os << ticks << "\n" << axis << "\n";
    for (const auto& [a, b] : l.cliques) {
        std::string bar(cols, ' ');
        for (std::size_t c = col_of(l.ranks[a]); c <= col_of(l.ranks[b]); ++c) bar[c] = '=';
        os << bar << "\n";
    }
    std::size_t width = 0;
    for (const auto& n : l.names) width = std::max(width, n.size());
    for (std::size_t i = 0; i < l.k; ++i) {
        std::string line(cols, ' ');
        line[col_of(l.ranks[i])] = '|';
        os << line << "  " << l.names[i] << std::string(width - l.names[i].size(), ' ') << "  "
           << detail::fmt(l.ranks[i]) << "\n";
    }
    os << "Groups not significantly different:\n";
    if (l.cliques.empty()) os << "  (none)\n";
    for (const auto& [a, b] : l.cliques) {
        os << "  {";
        for (std::size_t i = a; i <= b; ++i) os << (i == a ? "" : ", ") << l.names[i];
        os << "}\n";
    }
    return os.str();
}

} // namespace firedes::stats

#endif // FIREDES_STATS_HPP
