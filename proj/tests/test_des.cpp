#include <gtest/gtest.h>

#include "firedes/des.hpp"
#include "firedes/filtering.hpp"

#include "support/eval_fixture.hpp"
#include "support/toy.hpp"

using namespace firedes;
using fixture::evaluation;

namespace {

std::vector<bool> hits(std::size_t n, std::size_t first_correct, std::size_t size) {
    std::vector<bool> v(size, false);
    for (std::size_t j = first_correct; j < first_correct + n; ++j) v[j] = true;
    return v;
}

} // namespace

TEST(Ola, CountsCorrectMembers) {
    const auto ev = evaluation({0, 0, 0, 0}, {{true, true, true, true}, {true, false, true, false}, {true, true, false, true}},
                               {0, 1, 0});
    const auto s = ola(ev);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_DOUBLE_EQ(s[1], 0.5);
    EXPECT_DOUBLE_EQ(s[2], 0.75);
    EXPECT_EQ(select_best(ev, s).selected_indices, std::vector<std::size_t>{0});

    const auto none = evaluation({1, 0}, {{false, false}}, {1});
    EXPECT_DOUBLE_EQ(ola(none)[0], 0.0);
}

TEST(Ola, ToyRegionsReproduceTheMotivatingExample) {
    const auto pool = toy::pool();
    const auto plain = knn_region(toy::points(), toy::query, 4);
    const auto s1 = ola(evaluate_region(pool, plain));
    EXPECT_EQ(s1, (CompetenceVector{1.0, 0.5, 0.75}));
    const auto d1 = decide(Technique::ola, pool, plain);
    EXPECT_EQ(d1.selected_indices, std::vector<std::size_t>{0});
    EXPECT_NE(d1.label, toy::query_label);

    const auto balanced = knne_region(enn_filter(toy::points()).data, toy::query, 2);
    const auto s2 = ola(evaluate_region(pool, balanced));
    EXPECT_EQ(s2, (CompetenceVector{0.5, 0.75, 0.5}));
    const auto d2 = decide(Technique::ola, pool, balanced);
    EXPECT_EQ(d2.selected_indices, std::vector<std::size_t>{1});
    EXPECT_EQ(d2.label, toy::query_label);
}

TEST(Lca, RestrictsToPredictedClass) {
    const auto ev = evaluation({0, 0, 1, 1}, {{true, false, true, true}, {true, true, true, true}}, {0, 1});
    const auto s = lca(ev);
    EXPECT_DOUBLE_EQ(s[0], 0.5);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
    const auto absent = evaluation({0, 0}, {{true, true}}, {1});
    EXPECT_DOUBLE_EQ(lca(absent)[0], 0.0);
}

TEST(APriori, DistanceWeightedPosterior) {
    // P(true label) = 0.9 at distance 1 and 0.1 at distance 3.
    const auto ev = evaluation({1, 1}, {{true, false}}, {1}, {1.0, 3.0}, {0.9, 0.1});
    EXPECT_NEAR(a_priori(ev)[0], (0.9 + 0.1 / 3.0) / (1.0 + 1.0 / 3.0), 1e-12);
    EXPECT_NEAR(a_priori(ev)[0], 0.7, 1e-12);

    const auto flat = evaluation({0, 1, 1}, {{true, true, false}}, {0}, {0.2, 0.5, 0.9}, {0.5, 0.5, 0.5});
    EXPECT_NEAR(a_priori(flat)[0], 0.5, 1e-12);
}

TEST(APosteriori, ShareOfPredictedClassMass) {
    const auto ev = evaluation({1, 0}, {{true, false}}, {1}, {0.5, 0.5}, {0.8, 0.4});
    EXPECT_NEAR(a_posteriori(ev)[0], 2.0 / 3.0, 1e-12);
    const auto confident = evaluation({1, 1, 0}, {{true, true, true}}, {1}, {}, {1.0, 1.0, 0.0});
    EXPECT_NEAR(a_posteriori(confident)[0], 1.0, 1e-12);
    const auto absent = evaluation({0, 0}, {{true, true}}, {1});
    EXPECT_DOUBLE_EQ(a_posteriori(absent)[0], 0.0);
}

TEST(Mcb, CloseScoresSelectWholePool) {
    // With similarity threshold 0 every member counts: accuracies 15/20, 14/20, 4/20.
    std::vector<Label> labels(20, 1);
    const auto ev = evaluation(labels, {hits(15, 0, 20), hits(14, 0, 20), hits(4, 0, 20)}, {1, 1, 0});
    const auto d = mcb(ev, 0.0, 0.1);
    EXPECT_EQ(d.selected_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Mcb, DominantClassifierDecidesAlone) {
    std::vector<Label> labels(5, 1);
    const auto ev = evaluation(labels, {hits(0, 0, 5), hits(5, 0, 5), hits(0, 0, 5)}, {0, 1, 0});
    const auto d = mcb(ev, 0.0, 0.1);
    EXPECT_EQ(d.selected_indices, std::vector<std::size_t>{1});
    EXPECT_EQ(d.label, 1);
}

TEST(Mcb, IdenticalClassifiersVote) {
    const auto ev = evaluation({0, 1, 1}, {{true, false, true}, {true, false, true}, {true, false, true}}, {1, 1, 1});
    EXPECT_EQ(mcb(ev).selected_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(DesKnn, PrefersComplementaryPartnerOverClone) {
    const auto ev = evaluation({0, 1, 0, 1}, {{true, true, true, false}, {true, true, true, false}, {false, true, true, true}},
                               {0, 0, 1});
    const auto d = desknn(ev, 1.0, 0.6);
    EXPECT_EQ(d.selected_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(DesKnn, SingleMemberIsMostAccurate) {
    const auto ev = evaluation({0, 1, 0, 1}, {{true, false, false, false}, {true, true, true, false}, {false, true, false, true}},
                               {0, 1, 0});
    const auto d = desknn(ev, 0.5, 0.3);
    EXPECT_EQ(d.selected_indices, std::vector<std::size_t>{1});
    EXPECT_EQ(d.label, 1);
}

TEST(DesKnn, FullPercentagesVoteWithWholePool) {
    const auto ev = evaluation({0, 1}, {{true, false}, {false, true}, {true, true}}, {0, 1, 1});
    const auto d = desknn(ev, 1.0, 1.0);
    EXPECT_EQ(d.selected_indices, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(d.label, 1);
}

TEST(KnoraU, WeightsAreCorrectCounts) {
    // Hits 2, 3, 2; the 3-hit classifier alone votes for label 1.
    const auto ev = evaluation({0, 0, 1, 1}, {{true, true, false, false}, {true, true, true, false}, {false, false, true, true}},
                               {0, 1, 0});
    const auto d = knora_u(ev);
    EXPECT_EQ(d.label, 0);
    EXPECT_NEAR(d.positive_score, 4.0 / 7.0, 1e-12);
    EXPECT_EQ(d.selected_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(KnoraU, MonopolyAndTies) {
    const auto mono = evaluation({1, 1, 1}, {{true, true, true}, {false, false, false}}, {1, 0});
    EXPECT_EQ(knora_u(mono).label, 1);
    EXPECT_EQ(knora_u(mono).selected_indices, std::vector<std::size_t>{0});

    const auto tie = evaluation({0, 1}, {{true, false}, {false, true}}, {0, 1}, {}, {}, 1);
    EXPECT_EQ(knora_u(tie).label, 1);
    EXPECT_DOUBLE_EQ(knora_u(tie).positive_score, 0.5);
}

TEST(KnoraE, ImmediateHit) {
    std::vector<Label> labels{0, 1, 0, 1, 0, 1, 0};
    const auto ev = evaluation(labels, {hits(6, 0, 7), hits(7, 0, 7), hits(3, 0, 7)}, {0, 1, 0});
    EXPECT_EQ(knora_e(ev).selected_indices, std::vector<std::size_t>{1});
}

TEST(KnoraE, PlantedOutlierIsEliminated) {
    std::vector<Label> labels{0, 1, 0, 1, 0, 1, 0};
    const auto ev = evaluation(labels, {hits(5, 0, 7), hits(6, 0, 7), hits(4, 0, 7)}, {0, 1, 0});
    const auto d = knora_e(ev);
    EXPECT_EQ(d.selected_indices, std::vector<std::size_t>{1});
    EXPECT_EQ(d.label, 1);
}

TEST(KnoraE, NoneCorrectOnNearestUsesWholePool) {
    const auto ev = evaluation({0, 1, 1}, {{false, true, true}, {false, false, true}}, {1, 1});
    EXPECT_EQ(knora_e(ev).selected_indices, (std::vector<std::size_t>{0, 1}));
}

TEST(Decide, SingletonPoolIsThatClassifier) {
    const auto ev = evaluation({0, 1, 1}, {{false, true, false}}, {1});
    for (auto t : all_techniques) {
        const auto d = decide(t, ev);
        EXPECT_EQ(d.label, 1) << to_string(t);
        EXPECT_EQ(d.selected_indices, std::vector<std::size_t>{0}) << to_string(t);
    }
}

TEST(Decide, InvariantToWeightScaling) {
    auto scaled = toy::pool();
    for (auto& m : scaled.members) {
        for (auto& w : m.weights) w *= 7.5;
        m.bias *= 7.5;
    }
    const auto roc = knn_region(toy::points(), toy::query, 5);
    for (auto t : all_techniques) {
        const auto a = decide(t, toy::pool(), roc);
        const auto b = decide(t, scaled, roc);
        EXPECT_EQ(a.label, b.label) << to_string(t);
        EXPECT_EQ(a.selected_indices, b.selected_indices) << to_string(t);
        EXPECT_NEAR(a.positive_score, b.positive_score, 1e-12) << to_string(t);
    }
}

TEST(Decide, NamesAndErrors) {
    for (auto t : all_techniques) EXPECT_EQ(technique_from_string(to_string(t)), t);
    EXPECT_EQ(technique_from_string("kne"), Technique::kne);
    EXPECT_THROW(technique_from_string("META"), contract_error);
    RegionEvaluation empty;
    EXPECT_THROW(decide(Technique::ola, empty), contract_error);
}
