#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "nvq/mdp.hpp"
#include "nvq/policy.hpp"

namespace nvq {

/// Expected total discounted reward per state.
using ValueTable = Eigen::VectorXd;

/// Per-state argmax action sets (action indices, ascending) plus V_*.
///
/// Every optimal policy is supported on these sets, so two MDPs with the same
/// states and actions have the same optimal policies iff the sets coincide.
struct OptimalActionSets {
    std::vector<std::vector<Index>> actions;
    ValueTable values;
};

/// Alternating S_0, A_0, R_1, S_1, ... as parallel arrays;
/// states has one more entry than actions and rewards.
struct EpisodeTrace {
    std::vector<Index> states;
    std::vector<Index> actions;
    std::vector<double> rewards;
};

/**
 * Iterative policy evaluation.
 *
 * gamma = 0 returns sum_a pi(a|s) R(s,a) directly. Otherwise iterates
 * V <- r_pi + gamma P_pi V until the sup-norm change drops below
 * epsilon (1 - gamma) / (2 gamma), which bounds the error by epsilon / 2.
 * Throws DiscountRangeError unless 0 <= gamma < 1.
 */
ValueTable evaluate_policy(const FiniteMdp& mdp, const Policy& policy, double gamma, double epsilon = 1e-10);

/**
 * Optimal action sets.
 *
 * gamma = 0: argmax_a R(s,a) per state with ties within `tol`.
 * gamma > 0: value iteration with the evaluate_policy stopping rule, then the
 * greedy sets of Q = R + gamma P V with value-gap tolerance max(epsilon, tol).
 */
OptimalActionSets optimal_policy_set(const FiniteMdp& mdp, double gamma, double epsilon = 1e-10,
                                     double tol = kTolerance);

/// Set equality of per-state optimal actions, matching states and actions by label.
/// On failure `witness_state` receives the offending state of `a` (-1 for a size mismatch).
bool same_optimal_sets(const FiniteMdp& a, const OptimalActionSets& sa, const FiniteMdp& b,
                       const OptimalActionSets& sb, Index* witness_state = nullptr);

/// Samples num_steps transitions from start_state; deterministic in `seed`.
EpisodeTrace sample_trace(const FiniteMdp& mdp, const Policy& policy, Index start_state, Index num_steps,
                          std::uint64_t seed);

}  // namespace nvq
