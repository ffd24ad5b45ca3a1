#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvq/dp.hpp"
#include "nvq/mdp.hpp"
#include "nvq/newsvendor.hpp"

namespace nvq {

/// Per-state argmax of R(s,a) and V_* at gamma = 0.
OptimalActionSets solve_exact_gamma0(const FiniteMdp& mdp, double tol = kTolerance);

/// argmax_{a in F_t + Z_delta} sum_d P(d) Rew_t(a, d) per day, computed from
/// the spec alone (no MDP is built). Orders ascending.
std::vector<std::vector<std::int64_t>> oracle_bruteforce(const NewsvendorSpec& spec, std::int64_t horizon,
                                                         double tol = kTolerance);

enum class BanditAlgorithm { EpsilonGreedy, Ucb1 };

const char* to_string(BanditAlgorithm a);
/// Accepts "epsilon_greedy" and "ucb1".
std::optional<BanditAlgorithm> parse_bandit_algorithm(std::string_view name);

struct BanditConfig {
    BanditAlgorithm algorithm = BanditAlgorithm::EpsilonGreedy;
    double epsilon = 0.1;
    std::int64_t horizon_steps = 10'000;
    std::uint64_t seed = 0;
};

/// Throws Error when epsilon leaves [0,1] or horizon_steps < 1.
void validate(const BanditConfig& config);

struct BanditRun {
    /// Empirical-best action index per state after the last step (-1 if unplayed).
    std::vector<Index> identified;
    /// Expected regret V_*(s) - R(s, a) of every step.
    std::vector<double> regret;
    /// First step from which every context's empirical best stays optimal.
    std::optional<std::int64_t> steps_to_identification;
};

/**
 * Runs a (contextual) bandit learner on a gamma = 0 MDP.
 *
 * Step k visits state (k - 1) mod |S|. States mapped to the same context share
 * sample statistics and must offer the same actions; by default every state is
 * its own context. Unplayed actions are tried first, in action order.
 *
 * Throws NotBanditShapedError when some state's next-state distribution
 * depends on the action, since the action would then influence future contexts.
 */
BanditRun run_bandit(const FiniteMdp& mdp, const BanditConfig& config, const std::vector<Index>& context_of_state = {},
                     double tol = kTolerance);

/// Contexts of the original newsvendor MDP: days sharing (F_t, t mod L).
std::vector<Index> forecast_contexts(const NewsvendorSpec& spec, const FiniteMdp& original);

struct SeedRecord {
    std::uint64_t seed = 0;
    std::optional<std::int64_t> steps_original;
    std::optional<std::int64_t> steps_quotient;
};

struct ComparisonReport {
    std::vector<SeedRecord> records;
    std::int64_t distinct_forecasts = 0;
    std::int64_t horizon_steps = 0;
    /// Medians count unidentified runs as horizon_steps + 1.
    double median_original = 0.0;
    double median_quotient = 0.0;
    double ratio = 0.0;
    std::string rng;
};

/// Runs the learner on M (forecast contexts) and on M''/~ for seeds
/// config.seed, config.seed + 1, ..., sharing each seed between both runs.
ComparisonReport compare_sample_efficiency(const NewsvendorSpec& spec, std::int64_t horizon, const BanditConfig& config,
                                           std::int64_t num_seeds, double tol = kTolerance);

}  // namespace nvq
