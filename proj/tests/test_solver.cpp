#include <gtest/gtest.h>

#include "nvq/errors.hpp"
#include "nvq/solver.hpp"
#include "support.hpp"

namespace nvq {
namespace {

NewsvendorSpec three_day() {
    NewsvendorSpec spec;
    spec.forecasts = {10, 20, 15};
    spec.deviation_support = {-1, 0, 1};
    spec.deviation_probs = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    spec.purchase_cost = 5.0;
    spec.selling_price = 7.0;
    return spec;
}

std::vector<std::vector<std::int64_t>> orders_from_sets(const FiniteMdp& m, const OptimalActionSets& sets) {
    std::vector<std::vector<std::int64_t>> out;
    for (const auto& row : sets.actions) {
        std::vector<std::int64_t> day;
        for (Index a : row) day.push_back(std::stoll(m.action_label(a)));
        std::sort(day.begin(), day.end());
        out.push_back(day);
    }
    return out;
}

TEST(SolveExactGamma0, ThreeDay) {
    const auto m = build_original(three_day(), 3);
    EXPECT_EQ(orders_from_sets(m, solve_exact_gamma0(m)),
              (std::vector<std::vector<std::int64_t>>{{9}, {19}, {14}}));
    const auto r = reduce(three_day(), 3);
    const auto q = solve_exact_gamma0(r.quotient.mdp);
    EXPECT_EQ(orders_from_sets(r.quotient.mdp, q), (std::vector<std::vector<std::int64_t>>{{-1}}));
    EXPECT_NEAR(q.values(0), 1.0 / 3, 1e-12);

    const auto zero = make_mdp({"s"}, {"a", "b"}, {{"s", "a"}, {"s", "b"}},
                               {{{"s", "a"}, {{"s", 0.0, 1.0}}}, {{"s", "b"}, {{"s", 0.0, 1.0}}}});
    const auto z = solve_exact_gamma0(zero);
    EXPECT_EQ(z.actions[0].size(), 2u);
    EXPECT_EQ(z.values(0), 0.0);
}

TEST(OracleBruteforce, Examples) {
    EXPECT_EQ(oracle_bruteforce(three_day(), 3), (std::vector<std::vector<std::int64_t>>{{9}, {19}, {14}}));
    auto det = three_day();
    det.deviation_support = {0};
    det.deviation_probs = {{1.0}};
    EXPECT_EQ(oracle_bruteforce(det, 3), (std::vector<std::vector<std::int64_t>>{{10}, {20}, {15}}));

    auto heavy = three_day();
    heavy.deviation_probs = {{0.1, 0.1, 0.8}};
    EXPECT_EQ(oracle_bruteforce(heavy, 3), (std::vector<std::vector<std::int64_t>>{{11}, {21}, {16}}));
}

TEST(OracleBruteforce, MatchesSolverOnRandomSpecs) {
    test::Gen g(41);
    for (int i = 0; i < 30; ++i) {
        const auto spec = test::random_spec(g, {1, 40, {1, 3, 5, 7, 9}, static_cast<std::int64_t>(i % 3 + 1), i % 2 == 0});
        const auto horizon = static_cast<std::int64_t>(spec.forecasts.size());
        const auto oracle = oracle_bruteforce(spec, horizon);
        EXPECT_EQ(oracle, test::newsvendor_argmax(spec, horizon));
        const auto m = build_original(spec, horizon);
        EXPECT_EQ(orders_from_sets(m, solve_exact_gamma0(m)), oracle);
    }
}

TEST(RunBandit, IdentifiesThreeDayOptimum) {
    const auto r = reduce(three_day(), 3);
    BanditConfig config;
    config.horizon_steps = 20'000;
    config.seed = 3;
    const auto run = run_bandit(r.quotient.mdp, config);
    ASSERT_TRUE(run.steps_to_identification.has_value());
    EXPECT_EQ(r.quotient.mdp.action_label(run.identified[0]), "-1");
}

TEST(RunBandit, SingleActionIdentifiedAtFirstStep) {
    const auto m = make_mdp({"s"}, {"a"}, {{"s", "a"}}, {{{"s", "a"}, {{"s", 1.0, 0.5}, {"s", 3.0, 0.5}}}});
    BanditConfig config;
    config.horizon_steps = 10;
    EXPECT_EQ(run_bandit(m, config).steps_to_identification, 1);
}

TEST(RunBandit, DeterministicInSeed) {
    const auto r = reduce(three_day(), 3);
    for (auto algorithm : {BanditAlgorithm::EpsilonGreedy, BanditAlgorithm::Ucb1}) {
        BanditConfig config{algorithm, 0.2, 3'000, 99};
        const auto a = run_bandit(r.original, config);
        const auto b = run_bandit(r.original, config);
        EXPECT_EQ(a.regret, b.regret);
        EXPECT_EQ(a.identified, b.identified);
        EXPECT_EQ(a.steps_to_identification, b.steps_to_identification);
    }
}

TEST(RunBandit, RejectsMultiStepDynamics) {
    const auto m = make_mdp({"u", "v"}, {"a", "b"}, {{"u", "a"}, {"u", "b"}, {"v", "a"}},
                            {{{"u", "a"}, {{"u", 0.0, 1.0}}}, {{"u", "b"}, {{"v", 0.0, 1.0}}},
                             {{"v", "a"}, {{"u", 0.0, 1.0}}}});
    EXPECT_THROW(run_bandit(m, BanditConfig{}), NotBanditShapedError);
}

TEST(RunBandit, ValidatesConfig) {
    const auto r = reduce(three_day(), 3);
    EXPECT_THROW(run_bandit(r.quotient.mdp, BanditConfig{BanditAlgorithm::EpsilonGreedy, 1.5, 10, 0}), Error);
    EXPECT_THROW(run_bandit(r.quotient.mdp, BanditConfig{BanditAlgorithm::EpsilonGreedy, 0.1, 0, 0}), Error);
}

TEST(SolverProperties, RegretIsNonNegative) {
    test::Gen g(42);
    for (int i = 0; i < 10; ++i) {
        const auto spec = test::random_spec(g, {2, 15, {3, 5}, 1, true});
        const auto r = reduce(spec, static_cast<std::int64_t>(spec.forecasts.size()));
        for (auto algorithm : {BanditAlgorithm::EpsilonGreedy, BanditAlgorithm::Ucb1}) {
            BanditConfig config{algorithm, 0.1, 2'000, static_cast<std::uint64_t>(i)};
            for (const auto* m : {&r.original, &r.quotient.mdp})
                for (double x : run_bandit(*m, config).regret) EXPECT_GE(x, 0.0);
        }
    }
}

TEST(SolverProperties, GreedySweepIdentifiesDeterministicBandit) {
    test::Gen g(43);
    for (int i = 0; i < 20; ++i) {
        const auto n = static_cast<int>(test::uniform_int(g, 1, 6));
        std::vector<std::string> actions;
        std::vector<StateAction> adm;
        std::map<StateAction, std::vector<Outcome>> dyn;
        // Distinct rewards so the optimum is unique.
        std::vector<double> rewards;
        for (int k = 0; k < n; ++k) rewards.push_back(static_cast<double>(k * 3 - 7));
        std::shuffle(rewards.begin(), rewards.end(), g);
        for (int k = 0; k < n; ++k) {
            actions.push_back("a" + std::to_string(k));
            adm.push_back({"s", actions.back()});
            dyn[adm.back()] = {{"s", rewards[k], 1.0}};
        }
        const auto m = make_mdp({"s"}, actions, adm, dyn);
        BanditConfig config{BanditAlgorithm::EpsilonGreedy, 0.0, 50, static_cast<std::uint64_t>(i)};
        // The sweep plays actions in order; the best one is identified once played.
        const auto best = std::max_element(rewards.begin(), rewards.end()) - rewards.begin();
        EXPECT_EQ(run_bandit(m, config).steps_to_identification, best + 1);
    }
}

TEST(CompareSampleEfficiency, ReportShape) {
    auto spec = three_day();
    BanditConfig config{BanditAlgorithm::EpsilonGreedy, 0.1, 2'000, 5};
    const auto one = compare_sample_efficiency(spec, 3, config, 1);
    ASSERT_EQ(one.records.size(), 1u);
    EXPECT_EQ(one.records[0].seed, 5u);
    EXPECT_EQ(one.distinct_forecasts, 3);
    EXPECT_EQ(one.rng, "mt19937_64");
    EXPECT_THROW(compare_sample_efficiency(spec, 3, config, 0), Error);

    for (const auto& rec : compare_sample_efficiency(spec, 3, config, 6).records) {
        if (rec.steps_original) EXPECT_LE(*rec.steps_original, config.horizon_steps);
        if (rec.steps_quotient) EXPECT_LE(*rec.steps_quotient, config.horizon_steps);
    }
}

TEST(CompareSampleEfficiency, SingleForecastHasRatioNearOne) {
    NewsvendorSpec spec = three_day();
    spec.forecasts.assign(12, 10);
    BanditConfig config{BanditAlgorithm::EpsilonGreedy, 0.1, 20'000, 0};
    const auto report = compare_sample_efficiency(spec, 12, config, 15);
    EXPECT_EQ(report.distinct_forecasts, 1);
    // No context speedup. The unshaped rewards carry different noise, so only the order of magnitude matches.
    EXPECT_GE(report.ratio, 0.25);
    EXPECT_LE(report.ratio, 2.0);
}

TEST(CompareSampleEfficiency, QuotientColumnIgnoresHorizon) {
    test::Gen g(44);
    auto spec = test::random_spec(g, {40, 40, {3}, 1, true});
    spec.deviation_probs = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    spec.purchase_cost = 5.0;
    spec.selling_price = 7.0;
    BanditConfig config{BanditAlgorithm::EpsilonGreedy, 0.1, 5'000, 11};
    const auto short_run = compare_sample_efficiency(spec, 10, config, 5);
    const auto long_run = compare_sample_efficiency(spec, 40, config, 5);
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_EQ(short_run.records[i].steps_quotient, long_run.records[i].steps_quotient);
}

}  // namespace
}  // namespace nvq
