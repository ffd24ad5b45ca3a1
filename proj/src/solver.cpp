#include "nvq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nvq/errors.hpp"
#include "nvq/random.hpp"

namespace nvq {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require_bandit_shaped(const FiniteMdp& mdp, double tol) {
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const auto first = next_state_distribution(mdp, mdp.pair_begin(s));
        for (Index p = mdp.pair_begin(s) + 1; p < mdp.pair_end(s); ++p) {
            const auto other = next_state_distribution(mdp, p);
            bool same = first.size() == other.size();
            for (std::size_t i = 0; same && i < first.size(); ++i)
                same = first[i].first == other[i].first && std::abs(first[i].second - other[i].second) <= tol;
            if (!same)
                throw NotBanditShapedError("next state of '" + mdp.state_label(s) + "' depends on the action");
        }
    }
}

}  // namespace

OptimalActionSets solve_exact_gamma0(const FiniteMdp& mdp, double tol) {
    return optimal_policy_set(mdp, 0.0, 1e-10, tol);
}

std::vector<std::vector<std::int64_t>> oracle_bruteforce(const NewsvendorSpec& spec, std::int64_t horizon,
                                                         double tol) {
    validate(spec, tol);
    if (horizon < 1 || horizon > static_cast<std::int64_t>(spec.forecasts.size()))
        throw HorizonError("horizon out of range");
    std::vector<std::vector<std::int64_t>> out;
    for (std::int64_t t = 0; t < horizon; ++t) {
        const auto& probs = spec.distribution(t);
        std::vector<std::pair<std::int64_t, double>> values;
        for (std::int64_t offset : spec.deviation_support) {
            const std::int64_t a = spec.forecasts[t] + offset;
            double mean = 0.0;
            for (std::size_t i = 0; i < probs.size(); ++i) mean += probs[i] * reward(spec, t, a, spec.deviation_support[i]);
            values.emplace_back(a, mean);
        }
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [a, v] : values) best = std::max(best, v);
        std::vector<std::int64_t> argmax;
        for (const auto& [a, v] : values)
            if (v >= best - tol) argmax.push_back(a);
        out.push_back(std::move(argmax));
    }
    return out;
}

const char* to_string(BanditAlgorithm a) {
    return a == BanditAlgorithm::EpsilonGreedy ? "epsilon_greedy" : "ucb1";
}

std::optional<BanditAlgorithm> parse_bandit_algorithm(std::string_view name) {
    if (name == "epsilon_greedy") return BanditAlgorithm::EpsilonGreedy;
    if (name == "ucb1") return BanditAlgorithm::Ucb1;
    return std::nullopt;
}

void validate(const BanditConfig& config) {
    if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) throw Error("epsilon must lie in [0,1]");
    if (config.horizon_steps < 1) throw Error("bandit horizon must be at least 1 step");
}

BanditRun run_bandit(const FiniteMdp& mdp, const BanditConfig& config, const std::vector<Index>& context_of_state,
                     double tol) {
    validate(config);
    require_bandit_shaped(mdp, tol);

    std::vector<Index> context = context_of_state;
    if (context.empty())
        for (Index s = 0; s < mdp.num_states(); ++s) context.push_back(s);
    if (static_cast<Index>(context.size()) != mdp.num_states()) throw Error("context map must cover every state");
    const Index num_contexts = *std::max_element(context.begin(), context.end()) + 1;

    // Each context is represented by its first state; members must expose the same actions.
    std::vector<Index> rep(num_contexts, -1);
    for (Index s = 0; s < mdp.num_states(); ++s) {
        Index& r = rep[context[s]];
        if (r < 0) {
            r = s;
            continue;
        }
        bool same = mdp.num_admissible(r) == mdp.num_admissible(s);
        for (Index k = 0; same && k < mdp.num_admissible(s); ++k)
            same = mdp.pair_action(mdp.pair_begin(r) + k) == mdp.pair_action(mdp.pair_begin(s) + k);
        if (!same) throw Error("states in one context must offer the same actions");
    }

    const Eigen::VectorXd expected = expected_rewards(mdp);
    const auto optimum = optimal_policy_set(mdp, 0.0, 1e-10, tol);
    // optimal[c][k]: local action k is optimal for every member of context c.
    std::vector<std::vector<bool>> optimal(num_contexts);
    for (Index c = 0; c < num_contexts; ++c) optimal[c].assign(mdp.num_admissible(rep[c]), true);
    for (Index s = 0; s < mdp.num_states(); ++s) {
        auto& row = optimal[context[s]];
        for (Index k = 0; k < mdp.num_admissible(s); ++k) {
            const Index a = mdp.pair_action(mdp.pair_begin(s) + k);
            const auto& best = optimum.actions[s];
            if (!std::binary_search(best.begin(), best.end(), a)) row[k] = false;
        }
    }

    std::vector<std::vector<std::int64_t>> counts(num_contexts);
    std::vector<std::vector<double>> sums(num_contexts);
    std::vector<std::int64_t> visits(num_contexts, 0);
    for (Index c = 0; c < num_contexts; ++c) {
        counts[c].assign(mdp.num_admissible(rep[c]), 0);
        sums[c].assign(mdp.num_admissible(rep[c]), 0.0);
    }
    auto empirical_best = [&](Index c) -> Index {
        Index best = -1;
        double best_mean = -std::numeric_limits<double>::infinity();
        for (Index k = 0; k < static_cast<Index>(counts[c].size()); ++k) {
            if (counts[c][k] == 0) continue;
            const double mean = sums[c][k] / static_cast<double>(counts[c][k]);
            if (mean > best_mean) {
                best_mean = mean;
                best = k;
            }
        }
        return best;
    };
    auto first_unplayed = [&](Index c) -> Index {
        for (Index k = 0; k < static_cast<Index>(counts[c].size()); ++k)
            if (counts[c][k] == 0) return k;
        return -1;
    };

    Rng rng(config.seed);
    BanditRun run;
    run.regret.reserve(config.horizon_steps);
    std::vector<bool> correct(num_contexts, false);
    Index num_correct = 0;
    std::int64_t last_unidentified = 0;

    for (std::int64_t step = 1; step <= config.horizon_steps; ++step) {
        const Index s = (step - 1) % mdp.num_states();
        const Index c = context[s];
        const Index n_actions = mdp.num_admissible(s);

        Index k = -1;
        if (config.algorithm == BanditAlgorithm::EpsilonGreedy) {
            if (uniform01(rng) < config.epsilon)
                k = uniform_index(rng, n_actions);
            else if ((k = first_unplayed(c)) < 0)
                k = empirical_best(c);
        } else if ((k = first_unplayed(c)) < 0) {
            double best = -std::numeric_limits<double>::infinity();
            const double log_n = std::log(static_cast<double>(visits[c]));
            for (Index j = 0; j < n_actions; ++j) {
                const double n = static_cast<double>(counts[c][j]);
                const double score = sums[c][j] / n + std::sqrt(2.0 * log_n / n);
                if (score > best) {
                    best = score;
                    k = j;
                }
            }
        }

        const Index p = mdp.pair_begin(s) + k;
        const auto outs = mdp.outcomes(p);
        const double r = outs[sample_categorical(rng, outs, [](const Transition& t) { return t.prob; })].reward;
        ++visits[c];
        ++counts[c][k];
        sums[c][k] += r;
        run.regret.push_back(optimum.values(s) - expected(p));

        const Index best = empirical_best(c);
        const bool now = best >= 0 && optimal[c][best];
        if (now != correct[c]) {
            num_correct += now ? 1 : -1;
            correct[c] = now;
        }
        if (num_correct != num_contexts) last_unidentified = step;
    }

    if (last_unidentified < config.horizon_steps) run.steps_to_identification = last_unidentified + 1;
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const Index best = empirical_best(context[s]);
        run.identified.push_back(best < 0 ? -1 : mdp.pair_action(mdp.pair_begin(s) + best));
    }
    return run;
}

std::vector<Index> forecast_contexts(const NewsvendorSpec& spec, const FiniteMdp& original) {
    std::map<std::pair<std::int64_t, std::int64_t>, Index> ids;
    std::vector<Index> out;
    for (Index s = 0; s < original.num_states(); ++s) {
        const std::int64_t t = std::stoll(original.state_label(s).substr(2));
        auto [it, _] = ids.emplace(std::pair{spec.forecasts[t], t % spec.cycle_length}, static_cast<Index>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

ComparisonReport compare_sample_efficiency(const NewsvendorSpec& spec, std::int64_t horizon, const BanditConfig& config,
                                           std::int64_t num_seeds, double tol) {
    if (num_seeds < 1) throw Error("at least one seed is required");
    validate(config);
    const auto reduction = reduce(spec, horizon, tol);
    const auto contexts = forecast_contexts(spec, reduction.original);

    ComparisonReport report;
    report.distinct_forecasts = spec.distinct_forecasts(horizon);
    report.horizon_steps = config.horizon_steps;
    report.rng = kRngName;
    std::vector<double> orig, quot;
    const auto censored = [&](const std::optional<std::int64_t>& steps) {
        return static_cast<double>(steps.value_or(config.horizon_steps + 1));
    };
    for (std::int64_t i = 0; i < num_seeds; ++i) {
        BanditConfig run_config = config;
        run_config.seed = config.seed + static_cast<std::uint64_t>(i);
        SeedRecord record;
        record.seed = run_config.seed;
        record.steps_original = run_bandit(reduction.original, run_config, contexts, tol).steps_to_identification;
        record.steps_quotient = run_bandit(reduction.quotient.mdp, run_config, {}, tol).steps_to_identification;
        orig.push_back(censored(record.steps_original));
        quot.push_back(censored(record.steps_quotient));
        report.records.push_back(record);
    }
    report.median_original = median(orig);
    report.median_quotient = median(quot);
    report.ratio = report.median_original / report.median_quotient;
    return report;
}

}  // namespace nvq
