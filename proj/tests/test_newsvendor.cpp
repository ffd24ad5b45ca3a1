#include <gtest/gtest.h>

#include "nvq/dp.hpp"
#include "nvq/errors.hpp"
#include "nvq/newsvendor.hpp"
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

NewsvendorSpec deterministic(std::vector<std::int64_t> forecasts) {
    auto spec = three_day();
    spec.forecasts = std::move(forecasts);
    spec.deviation_support = {0};
    spec.deviation_probs = {{1.0}};
    return spec;
}

std::multiset<std::pair<double, double>> outcomes(const FiniteMdp& m, Index p) {
    std::multiset<std::pair<double, double>> out;
    for (const auto& o : m.outcomes(p)) out.emplace(o.reward, o.prob);
    return out;
}

TEST(Validate, Invariants) {
    EXPECT_NO_THROW(validate(three_day()));
    auto s = three_day();
    s.purchase_cost = 7.0;
    try {
        validate(s);
        FAIL();
    } catch (const SpecError& e) {
        EXPECT_STREQ(e.what(), "purchase cost must be less than selling price");
    }
    s = three_day();
    s.deviation_probs = {{0.3, 0.3, 0.2}};
    EXPECT_THROW(validate(s), SpecError);
    s = three_day();
    s.forecasts = {0, 3};
    EXPECT_THROW(validate(s), SpecError);  // F_0 - 1 < 0
    s = three_day();
    s.cycle_length = 2;
    s.deviation_probs = {{0.5, 0.5, 0.0}, {0.5, 0.5, 0.0}, {1.0, 0.0, 0.0}};
    EXPECT_THROW(validate(s), SpecError);
    s = three_day();
    s.deviation_support = {1, 0, -1};
    EXPECT_THROW(validate(s), SpecError);
    EXPECT_EQ(three_day().demand_bound(), 22);
}

TEST(Reward, Examples) {
    const auto s = three_day();
    EXPECT_DOUBLE_EQ(reward(s, 0, 10, 0), 20.0);
    EXPECT_DOUBLE_EQ(reward(s, 0, 10, -1), 13.0);
    EXPECT_DOUBLE_EQ(reward(s, 1, 20, 0), 20.0 * (7.0 - 5.0));
    EXPECT_THROW(reward(s, 0, 12, 0), OutOfRangeActionError);
    EXPECT_THROW(reward(s, 0, 10, 2), OutOfSupportDeviationError);
    EXPECT_THROW(reward(s, 3, 10, 0), HorizonError);
}

TEST(ShapedReward, ClosedForm) {
    const auto s = three_day();
    for (std::int64_t d : {-1, 0, 1}) EXPECT_EQ(shaped_reward(s, 0, d), 0.0);
    EXPECT_EQ(shaped_reward(s, 1, 1), 2.0);
    EXPECT_EQ(shaped_reward(s, 1, 0), -5.0);
    EXPECT_EQ(shaped_reward(s, 1, -1), -5.0);
    EXPECT_EQ(shaped_reward(s, -1, -1), 5.0);
    EXPECT_EQ(shaped_reward(s, -1, 0), -2.0);
    EXPECT_EQ(shaped_reward(s, -1, 1), -2.0);
    EXPECT_THROW(shaped_reward(s, 2, 0), OutOfSupportError);
}

TEST(BuildOriginal, ThreeDay) {
    const auto m = build_original(three_day(), 3);
    EXPECT_EQ(m.num_states(), 3);
    for (Index s = 0; s < 3; ++s) EXPECT_EQ(m.num_admissible(s), 3);
    EXPECT_EQ(build_original(three_day(), 1).num_states(), 1);
    EXPECT_THROW(build_original(three_day(), 4), HorizonError);
    EXPECT_THROW(build_original(three_day(), 0), HorizonError);
}

TEST(BuildOriginal, MergesSaturatedDeviations) {
    // Ordering F_t - 1 sells everything for d in {0, 1}.
    const auto m = build_original(three_day(), 3);
    const auto outs = outcomes(m, m.pair_index("s_0", "9"));
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_NEAR(outs.begin()->second, 1.0, 1e-12);
    const auto outs10 = outcomes(m, m.pair_index("s_0", "10"));
    ASSERT_EQ(outs10.size(), 2u);
    EXPECT_NEAR(outs10.rbegin()->second, 2.0 / 3, 1e-12);
}

TEST(DeterministicOptimal, Examples) {
    const auto m = build_original(three_day(), 3);
    EXPECT_EQ(orders_of(m, deterministic_optimal(three_day(), m)), (std::vector<std::int64_t>{10, 20, 15}));
    const auto c = deterministic({7, 7, 7, 7});
    const auto cm = build_original(c, 4);
    EXPECT_EQ(orders_of(cm, deterministic_optimal(c, cm)), (std::vector<std::int64_t>{7, 7, 7, 7}));
    const auto d = deterministic({4, 9, 2});
    const auto dm = build_original(d, 3);
    const auto opt = optimal_policy_set(dm, 0.0);
    const auto det = deterministic_optimal(d, dm);
    for (Index s = 0; s < 3; ++s) EXPECT_EQ(opt.actions[s], std::vector<Index>{*det.deterministic_action(dm, s)});
}

TEST(Shape, ThreeDay) {
    const auto spec = three_day();
    const auto m = build_original(spec, 3);
    const auto shaped = shape(spec, m);
    for (Index s = 0; s < 3; ++s) {
        const auto f = std::to_string(spec.forecasts[s]);
        const auto zero = outcomes(shaped, shaped.pair_index(shaped.state_label(s), f));
        ASSERT_EQ(zero.size(), 1u);
        EXPECT_EQ(zero.begin()->first, 0.0);
    }
    const auto up = outcomes(shaped, shaped.pair_index("s_0", "11"));
    ASSERT_EQ(up.size(), 2u);
    EXPECT_EQ(up.begin()->first, -5.0);
    EXPECT_NEAR(up.begin()->second, 2.0 / 3, 1e-12);
    EXPECT_EQ(up.rbegin()->first, 2.0);
    EXPECT_NEAR(up.rbegin()->second, 1.0 / 3, 1e-12);
}

TEST(Relabel, ThreeDay) {
    const auto spec = three_day();
    const auto shaped = shape(spec, build_original(spec, 3));
    const auto [m2, h] = relabel(spec, shaped);
    EXPECT_TRUE(verify_relabeling(shaped, m2, h).ok);
    for (Index s = 0; s < 3; ++s) EXPECT_EQ(m2.num_admissible(s), 3);
    EXPECT_EQ(h.action_maps.at("s_1").at("21"), "1");

    auto zero = three_day();
    zero.forecasts = {0, 0, 0};
    zero.deviation_support = {0, 1, 2};
    const auto ids = shape(zero, build_original(zero, 3));
    const auto ih = relabel(zero, ids).relabeling;
    for (const auto& [s, g] : ih.action_maps)
        for (const auto& [a, b] : g) EXPECT_EQ(a, b);
}

TEST(ConstructSymmetry, BlockCounts) {
    const auto spec = three_day();
    const auto m2 = relabel(spec, shape(spec, build_original(spec, 3))).mdp;
    const auto sym = construct_symmetry(spec, m2);
    EXPECT_EQ(sym.num_state_blocks(), 1);
    EXPECT_EQ(sym.num_pair_blocks(), 3);
    EXPECT_TRUE(is_simple(sym, m2));

    const auto one = relabel(spec, shape(spec, build_original(spec, 1))).mdp;
    EXPECT_EQ(construct_symmetry(spec, one).num_state_blocks(), 1);

    test::Gen g(31);
    test::SpecShape cycle{10, 10, {3}, 5, true};
    const auto cspec = test::random_spec(g, cycle);
    const auto cm = relabel(cspec, shape(cspec, build_original(cspec, 10))).mdp;
    EXPECT_EQ(construct_symmetry(cspec, cm).num_state_blocks(), 5);
}

TEST(Reduce, ThreeDay) {
    const auto r = reduce(three_day(), 3);
    EXPECT_EQ(r.quotient_states(), 1);
    EXPECT_EQ(r.quotient.mdp.num_actions(), 3);
    const auto& q = r.quotient.mdp;
    EXPECT_NEAR(expected_reward(q, "[s_0]", "-1"), 1.0 / 3, 1e-12);
    EXPECT_NEAR(expected_reward(q, "[s_0]", "0"), 0.0, 1e-12);
    EXPECT_NEAR(expected_reward(q, "[s_0]", "1"), -8.0 / 3, 1e-12);

    const auto opt = optimal_policy_set(q, 0.0);
    ASSERT_EQ(opt.actions[0].size(), 1u);
    EXPECT_EQ(q.action_label(opt.actions[0][0]), "-1");
    const auto pi = Policy::deterministic(q, {opt.actions[0][0]});
    EXPECT_EQ(quotient_offsets(r, pi), std::vector<std::int64_t>{-1});
    EXPECT_EQ(orders_of(r.original, r.pullback(pi)), (std::vector<std::int64_t>{9, 19, 14}));
    EXPECT_EQ(pulled_back_orders(r, {-1}), (std::vector<std::int64_t>{9, 19, 14}));
    // The generic hidden-symmetry pullback agrees with the closed form.
    EXPECT_TRUE(approx_equal(hidden_pullback(r.original, r.hidden_symmetry, r.quotient, pi), r.pullback(pi), 0.0));
}

TEST(Reduce, DeterministicSpec) {
    const auto spec = deterministic({3, 8, 5, 1});
    const auto r = reduce(spec, 4);
    EXPECT_EQ(r.quotient.mdp.num_actions(), 1);
    const auto opt = optimal_policy_set(r.quotient.mdp, 0.0);
    const auto pi = Policy::deterministic(r.quotient.mdp, {opt.actions[0][0]});
    EXPECT_EQ(orders_of(r.original, r.pullback(pi)), spec.forecasts);
    EXPECT_TRUE(approx_equal(r.pullback(pi), deterministic_optimal(spec, r.original), 0.0));
}

TEST(Reduce, StochasticPullback) {
    const auto r = reduce(three_day(), 3);
    const auto pi = Policy::uniform(r.quotient.mdp);
    const auto back = r.pullback(pi);
    EXPECT_NEAR(back.prob(r.original, "s_2", "16"), 1.0 / 3, 1e-15);
}

// Properties over random specs.

TEST(NewsvendorProperties, ShapedRewardIsDayIndependent) {
    test::Gen g(32);
    for (int i = 0; i < 30; ++i) {
        const auto spec = test::random_spec(g, {1, 30, {1, 3, 5, 7, 9}, 1, i % 2 == 0});
        for (std::size_t t = 0; t < spec.forecasts.size(); ++t)
            for (auto a : spec.deviation_support)
                for (auto d : spec.deviation_support) {
                    const auto f = spec.forecasts[t];
                    const auto t64 = static_cast<std::int64_t>(t);
                    // Profit of the forecast order, which need not be admissible.
                    const double base = static_cast<double>(std::min(f + d, f)) * spec.selling_price -
                                        static_cast<double>(f) * spec.purchase_cost;
                    EXPECT_EQ(reward(spec, t64, a + f, d) - base, shaped_reward(spec, a, d));
                }
    }
}

TEST(NewsvendorProperties, ReductionSoundness) {
    test::Gen g(33);
    for (int i = 0; i < 25; ++i) {
        const auto spec = test::random_spec(g, {1, 60, {1, 2, 3, 5, 7, 9}, 1, i % 2 == 1});
        const auto horizon = static_cast<std::int64_t>(spec.forecasts.size());
        const auto r = reduce(spec, horizon);
        const auto oracle = test::newsvendor_argmax(spec, horizon);
        const auto opt = optimal_policy_set(r.quotient.mdp, 0.0);
        test::for_each_selection(opt.actions, [&](const std::vector<Index>& pick) {
            const auto qpi = Policy::deterministic(r.quotient.mdp, pick);
            const auto pi = hidden_pullback(r.original, r.hidden_symmetry, r.quotient, qpi);
            const auto orders = orders_of(r.original, pi);
            for (std::int64_t t = 0; t < horizon; ++t) {
                const auto& best = oracle[t];
                EXPECT_TRUE(std::find(best.begin(), best.end(), orders[t]) != best.end()) << "day " << t;
            }
        });
    }
}

TEST(NewsvendorProperties, NoVisibleSymmetryOnOriginal) {
    test::Gen g(34);
    for (int i = 0; i < 10; ++i) {
        auto spec = test::random_spec(g, {2, 8, {3, 5}, 1, true});
        // Distinct forecasts make every day's reward distribution different.
        for (std::size_t t = 0; t < spec.forecasts.size(); ++t) spec.forecasts[t] = 10 + 7 * static_cast<std::int64_t>(t);
        const auto horizon = static_cast<std::int64_t>(spec.forecasts.size());
        const auto m = build_original(spec, horizon);
        for (Index s1 = 0; s1 < m.num_states(); ++s1)
            for (Index s2 = s1 + 1; s2 < m.num_states(); ++s2) {
                std::vector<Index> blocks(m.num_states());
                for (Index s = 0; s < m.num_states(); ++s) blocks[s] = s;
                blocks[s2] = s1;
                // The coarsest pair partition is valid whenever any symmetry with these state blocks is.
                EXPECT_FALSE(check_visible_symmetry(m, coarsest_symmetry(m, blocks)).valid) << s1 << "," << s2;
            }
    }
}

TEST(NewsvendorProperties, QuotientHasCycleLengthStates) {
    test::Gen g(35);
    for (int i = 0; i < 20; ++i) {
        const std::int64_t cycle = test::uniform_int(g, 1, 7);
        const auto spec = test::random_spec(g, {cycle, 40, {3, 5}, cycle, true});
        for (std::int64_t horizon : {cycle, static_cast<std::int64_t>(spec.forecasts.size())})
            EXPECT_EQ(reduce(spec, horizon).quotient_states(), cycle);
    }
}

TEST(NewsvendorProperties, ConstantOffsetPerResidue) {
    test::Gen g(36);
    for (int i = 0; i < 20; ++i) {
        const std::int64_t cycle = test::uniform_int(g, 1, 5);
        const auto spec = test::random_spec(g, {cycle, 30, {3, 5, 7}, cycle, true});
        const auto horizon = static_cast<std::int64_t>(spec.forecasts.size());
        const auto r = reduce(spec, horizon);
        std::vector<Index> pick;
        for (Index s = 0; s < r.quotient.mdp.num_states(); ++s)
            pick.push_back(r.quotient.mdp.pair_action(
                r.quotient.mdp.pair_begin(s) + test::uniform_int(g, 0, r.quotient.mdp.num_admissible(s) - 1)));
        const auto orders = orders_of(r.original, r.pullback(Policy::deterministic(r.quotient.mdp, pick)));
        for (std::int64_t t = cycle; t < horizon; ++t)
            EXPECT_EQ(orders[t] - spec.forecasts[t], orders[t - cycle] - spec.forecasts[t - cycle]);
    }
}

TEST(RewardCondition, Examples) {
    auto spec = three_day();
    spec.forecasts = {10, 20, 15, 12, 30, 18};
    const auto profit = check_reward_condition(spec, profit_reward(spec), 6);
    EXPECT_TRUE(profit.holds);
    EXPECT_EQ(profit.x, 0);

    const auto quad = check_reward_condition(
        spec,
        [&](std::int64_t t, std::int64_t a, std::int64_t d) {
            const double e = static_cast<double>(a - spec.forecasts[t] - d);
            return -e * e;
        },
        6);
    EXPECT_TRUE(quad.holds);
    EXPECT_EQ(quad.x, 0);

    const auto slope = check_reward_condition(
        spec, [](std::int64_t t, std::int64_t a, std::int64_t) { return static_cast<double>(t * a); }, 6);
    EXPECT_FALSE(slope.holds);
    EXPECT_FALSE(slope.x.has_value());
    EXPECT_FALSE(slope.violation.empty());
}

}  // namespace
}  // namespace nvq
