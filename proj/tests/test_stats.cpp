#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "firedes/stats.hpp"

using namespace firedes;
using namespace firedes::stats;

namespace {

// Two-sided exact p by enumerating every sign pattern; needs untied |d|.
double wilcoxon_bruteforce(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::fabs(d[a]) < std::fabs(d[b]); });
    std::vector<int> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<int>(r + 1);
    int observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) observed += rank[i];
    std::size_t le = 0, ge = 0;
    const std::size_t patterns = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
        int w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) w += rank[i];
        le += w <= observed;
        ge += w >= observed;
    }
    return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(patterns));
}

// Two-sided Student-t tail by Simpson quadrature of the density on [0, |t|].
double t_two_sided_quadrature(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    const auto pdf = [&](double x) { return c * std::pow(1.0 + x * x / df, -(df + 1) / 2); };
    const int steps = 20000;
    const double h = std::fabs(t) / steps;
    double s = pdf(0) + pdf(std::fabs(t));
    for (int i = 1; i < steps; ++i) s += pdf(i * h) * (i % 2 ? 4.0 : 2.0);
    return 1.0 - 2.0 * s * h / 3.0;
}

// Maximal sets of methods whose ranks are pairwise within cd, by subset enumeration.
std::set<std::set<std::size_t>> maximal_groups(const std::vector<double>& ranks, double cd) {
    const std::size_t k = ranks.size();
    std::vector<std::set<std::size_t>> ok;
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        std::set<std::size_t> s;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1) s.insert(i);
        bool within = s.size() >= 2;
        for (auto a : s)
            for (auto b : s) within = within && std::fabs(ranks[a] - ranks[b]) <= cd;
        if (within) ok.push_back(s);
    }
    std::set<std::set<std::size_t>> out;
    for (const auto& s : ok) {
        bool maximal = true;
        for (const auto& t : ok)
            if (t.size() > s.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) maximal = false;
        if (maximal) out.insert(s);
    }
    return out;
}

} // namespace

TEST(Ranks, DescendingWithAveragedTies) {
    EXPECT_EQ(rank_descending({0.9, 0.5, 0.7}), (std::vector<double>{1, 3, 2}));
    EXPECT_EQ(rank_descending({0.5, 0.8, 0.5, 0.5}), (std::vector<double>{3, 1, 3, 3}));
    std::mt19937_64 g(1);
    std::uniform_int_distribution<int> u(0, 3);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> s(7);
        for (auto& v : s) v = u(g);
        const auto r = rank_descending(s);
        EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), 28.0);
    }
}

TEST(Ranks, TableShapeChecked) {
    EXPECT_THROW(make_rank_table({"a", "b"}, {"x"}, {{1.0}}), contract_error);
    const auto t = make_rank_table({"a", "b"}, {"x", "y"}, {{0.9, 0.8}, {0.7, 0.7}});
    EXPECT_EQ(t.average_ranks(), (std::vector<double>{1.25, 1.75}));
}

TEST(Wilcoxon, IdenticalSamplesAreDegenerate) {
    const std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    const auto r = wilcoxon_signed_rank(a, a);
    EXPECT_TRUE(r.degenerate);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    EXPECT_FALSE(r.reject);
}

TEST(Wilcoxon, EightPositiveDifferences) {
    const std::vector<double> a{1.1, 2.2, 3.3, 4.4, 5.5, 6.6, 7.7, 8.8};
    const std::vector<double> b{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    const auto r = wilcoxon_signed_rank(a, b);
    EXPECT_NEAR(r.p_value, 2.0 / 256.0, 1e-12);
    EXPECT_NEAR(r.p_value, 0.0078, 5e-5);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_TRUE(r.reject);
}

TEST(Wilcoxon, ExactMatchesEnumeration) {
    std::mt19937_64 g(8);
    std::normal_distribution<double> noise(0.2, 1.0);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 6 + static_cast<std::size_t>(rep % 7);
        std::vector<double> a(n), b(n, 0.0), d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = a[i] = noise(g);
        EXPECT_NEAR(wilcoxon_signed_rank(a, b, 0.10, WilcoxonMode::exact).p_value, wilcoxon_bruteforce(d), 1e-12);
    }
}

TEST(Wilcoxon, FortyPairsNormalCloseToExact) {
    std::mt19937_64 g(40);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a(40), b(40);
    for (std::size_t i = 0; i < 40; ++i) {
        b[i] = noise(g);
        a[i] = b[i] + 0.3 + noise(g);
    }
    const auto approx = wilcoxon_signed_rank(a, b);
    const auto exact = wilcoxon_signed_rank(a, b, 0.10, WilcoxonMode::exact);
    EXPECT_EQ(approx.n, 40u);
    EXPECT_NEAR(approx.p_value, exact.p_value, 0.01);
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(b, a).p_value, approx.p_value);
}

TEST(Wilcoxon, TooFewDifferences) {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> b{1, 2, 3, 0, 0, 0, 0};
    EXPECT_THROW(wilcoxon_signed_rank(a, b), contract_error);
    EXPECT_THROW(wilcoxon_signed_rank(a, {1.0}), contract_error);
}

TEST(SignTest, CriticalValues) {
    EXPECT_NEAR(sign_test_critical(40, 0.10), 24.05, 0.01);
    EXPECT_NEAR(sign_test_critical(40, 0.05), 25.20, 0.01);
    EXPECT_NEAR(sign_test_critical(40, 0.01), 27.37, 0.01);
    EXPECT_NEAR(z_critical(0.05, false), 1.644854, 1e-6);
    EXPECT_THROW(z_critical(0.7), contract_error);
}

TEST(SignTest, TiesCountHalf) {
    std::vector<double> a(40, 1.0), b(40, 0.0);
    for (std::size_t i = 0; i < 11; ++i) b[i] = 2.0;   // 11 losses
    for (std::size_t i = 11; i < 15; ++i) b[i] = 1.0;  // 4 ties, 25 wins
    const auto r = sign_test(a, b);
    EXPECT_EQ(r.wins, 25u);
    EXPECT_EQ(r.ties, 4u);
    EXPECT_EQ(r.losses, 11u);
    EXPECT_DOUBLE_EQ(r.score(), 27.0);
    EXPECT_TRUE(r.reject);
    EXPECT_TRUE(sign_test(a, b, 0.05).reject);
    EXPECT_FALSE(sign_test(a, b, 0.01).reject);
}

TEST(Friedman, HandComputedFourByThree) {
    // One method always first, the other two trade places: average ranks 1, 2.5, 2.5.
    const auto t = make_rank_table({"A", "B", "C"}, {"1", "2", "3", "4"},
                                   {{0.9, 0.8, 0.7}, {0.9, 0.6, 0.5}, {0.9, 0.7, 0.8}, {0.9, 0.5, 0.6}});
    const auto r = friedman(t);
    EXPECT_NEAR(r.statistic, 6.0, 1e-12);
    EXPECT_NEAR(r.p_value, std::exp(-3.0), 1e-10);  // chi-square, 2 df
    EXPECT_NEAR(r.log10_p, -3.0 / std::log(10.0), 1e-9);
    EXPECT_TRUE(r.reject);
}

TEST(Friedman, IdenticalColumnsAreNull) {
    const auto t = make_rank_table({"A", "B", "C"}, {"1", "2", "3"}, {{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}, {0.1, 0.1, 0.1}});
    const auto r = friedman(t);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    EXPECT_FALSE(r.reject);
}

TEST(Friedman, LargeTableTailUnderflows) {
    std::vector<std::string> methods{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    std::vector<std::string> blocks;
    std::vector<std::vector<double>> scores;
    std::mt19937_64 g(5);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int b = 0; b < 320; ++b) {
        blocks.push_back(std::to_string(b));
        std::vector<double> row;
        for (int m = 0; m < 8; ++m) row.push_back(0.7 + 0.01 * m + noise(g));
        scores.push_back(row);
    }
    const auto r = friedman(make_rank_table(methods, blocks, scores));
    EXPECT_LT(r.p_value, 1e-60);
    EXPECT_LT(r.log10_p, -60.0);
    EXPECT_TRUE(std::isfinite(r.log10_p));
    EXPECT_TRUE(r.reject);
}

TEST(Friedman, LogTailAgreesWhereRepresentable) {
    for (double stat : {3.0, 15.0, 40.0, 120.0})
        EXPECT_NEAR(detail::log10_chi_squared_sf(stat, 7.0), std::log10(detail::chi_squared_sf(stat, 7.0)), 1e-8);
    EXPECT_THROW(friedman(make_rank_table({"A"}, {"1", "2"}, {{0.1}, {0.2}})), contract_error);
}

TEST(Nemenyi, TabulatedCriticalDifferences) {
    EXPECT_NEAR(nemenyi_cd(8, 320), 0.5383, 0.005);
    EXPECT_NEAR(nemenyi_cd(16, 40), 3.4021, 0.01);
    EXPECT_NEAR(nemenyi_cd(6, 40), 1.0828, 0.005);
    EXPECT_THROW(nemenyi_cd(21, 40), contract_error);
    EXPECT_THROW(nemenyi_cd(8, 40, 0.01), contract_error);
}

TEST(Nemenyi, ScalesWithInverseRootOfBlocks) {
    for (std::size_t k = 2; k <= 20; ++k) {
        EXPECT_NEAR(nemenyi_cd(k, 160), nemenyi_cd(k, 40) / 2.0, 1e-12);
        EXPECT_GT(nemenyi_cd(k, 40, 0.05), nemenyi_cd(k, 40, 0.10));
    }
}

TEST(PairedT, MatchesQuadrature) {
    std::mt19937_64 g(20);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> a(20), b(20);
    for (std::size_t i = 0; i < 20; ++i) {
        b[i] = 0.8 + noise(g);
        a[i] = b[i] + 0.01 + noise(g);
    }
    const auto r = paired_t_test(a, b);
    EXPECT_NEAR(r.p_value, t_two_sided_quadrature(r.statistic, 19.0), 1e-4);
    EXPECT_DOUBLE_EQ(paired_t_test(b, a).p_value, r.p_value);
}

TEST(PairedT, DegenerateAndDominant) {
    const std::vector<double> a{0.1, 0.4, 0.3, 0.9};
    const auto same = paired_t_test(a, a);
    EXPECT_TRUE(same.degenerate);
    EXPECT_FALSE(same.reject);
    const std::vector<double> b{0.0, 0.0, 0.0, 0.0};
    const std::vector<double> c{1.0, 1.001, 0.999, 1.0005};
    EXPECT_LT(paired_t_test(c, b).p_value, 0.01);
}

TEST(CdDiagram, TwoMethodsWithinAndBeyond) {
    EXPECT_EQ(cd_layout({"a", "b"}, {1.0, 2.0}, 1.5).cliques.size(), 1u);
    EXPECT_TRUE(cd_layout({"a", "b", "c"}, {1.0, 2.0, 3.0}, 0.5).cliques.empty());
    const auto far = cd_cliques({1.0, 3.0}, 1.5);
    EXPECT_TRUE(far.empty());
    const auto svg = emit_cd_diagram_svg({"a", "b"}, {1.0, 2.0}, 1.5);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("class=\"clique\""), std::string::npos);
    EXPECT_EQ(emit_cd_diagram_svg({"a", "b", "c"}, {1.0, 3.0, 2.0}, 0.5).find("class=\"clique\""), std::string::npos);
}

TEST(CdDiagram, EightScenarioRanksMatchBruteForceGroups) {
    const std::vector<std::string> names{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    const std::vector<double> ranks{5.71, 4.86, 4.98, 4.62, 4.40, 4.55, 3.64, 3.24};
    const double cd = 0.5383;
    const auto layout = cd_layout(names, ranks, cd);
    std::set<std::set<std::string>> got;
    for (const auto& [a, b] : layout.cliques) {
        std::set<std::string> s;
        for (std::size_t i = a; i <= b; ++i) s.insert(layout.names[i]);
        got.insert(s);
    }
    std::set<std::set<std::string>> want;
    for (const auto& g : maximal_groups(ranks, cd)) {
        std::set<std::string> s;
        for (auto i : g) s.insert(names[i]);
        want.insert(s);
    }
    EXPECT_EQ(got, want);
    EXPECT_EQ(layout.names.front(), "VIII");

    const auto text = emit_cd_diagram_text(names, ranks, cd);
    EXPECT_NE(text.find("Groups not significantly different:"), std::string::npos);
    EXPECT_NE(text.find("0.5383"), std::string::npos);
}

TEST(CdDiagram, RandomRanksMatchBruteForce) {
    std::mt19937_64 g(12);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t k = 2 + static_cast<std::size_t>(rep % 8);
        std::uniform_real_distribution<double> u(1.0, static_cast<double>(k));
        std::vector<double> r(k);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < k; ++i) {
            r[i] = std::round(u(g) * 4.0) / 4.0;
            names.push_back("m" + std::to_string(i));
        }
        const double cd = std::uniform_real_distribution<double>(0.1, 2.0)(g);
        const auto layout = cd_layout(names, r, cd);
        std::set<std::set<std::string>> got, want;
        for (const auto& [a, b] : layout.cliques) {
            std::set<std::string> s;
            for (std::size_t i = a; i <= b; ++i) s.insert(layout.names[i]);
            got.insert(s);
        }
        for (const auto& grp : maximal_groups(r, cd)) {
            std::set<std::string> s;
            for (auto i : grp) s.insert(names[i]);
            want.insert(s);
        }
        EXPECT_EQ(got, want) << "case " << rep;
    }
}

TEST(CdDiagram, RanksOutsideRangeRejected) {
    EXPECT_THROW(cd_layout({"a", "b"}, {0.5, 2.0}, 1.0), contract_error);
    EXPECT_THROW(cd_layout({"a"}, {1.0, 2.0}, 1.0), contract_error);
}

TEST(Reports, JsonFields) {
    const auto j = to_json(paired_t_test({0.1, 0.3, 0.2}, {0.0, 0.1, 0.15}));
    for (const char* key : {"statistic", "p_value", "log10_p", "alpha", "reject", "degenerate", "n"})
        EXPECT_TRUE(j.contains(key)) << key;
}
