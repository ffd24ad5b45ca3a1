#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nvq/mdp.hpp"
#include "nvq/policy.hpp"
#include "nvq/symmetry.hpp"
#include "nvq/transforms.hpp"

namespace nvq {

/**
 * Multi-period newsvendor instance.
 *
 * Day t has forecast F_t and demand F_t + delta_t with delta_t drawn from
 * deviation_probs[t mod L] over deviation_support. A single distribution
 * serves every residue. cycle_length = 1 is the standard i.i.d. problem.
 */
struct NewsvendorSpec {
    std::vector<std::int64_t> forecasts;
    std::vector<std::int64_t> deviation_support;
    std::vector<std::vector<double>> deviation_probs;
    double purchase_cost = 0.0;
    double selling_price = 0.0;
    std::int64_t cycle_length = 1;

    const std::vector<double>& distribution(std::int64_t t) const;
    /// C = max_t F_t + max(Z_delta) + 1, so 0 <= F_t + d < C.
    std::int64_t demand_bound() const;
    /// Distinct forecast values among the first `horizon` days.
    std::int64_t distinct_forecasts(std::int64_t horizon) const;
};

/// Throws SpecError naming the first violated invariant.
void validate(const NewsvendorSpec& spec, double tol = kTolerance);

/// Rew_t(a, d) = min(F_t + d, a) C_s - a C_p.
double reward(const NewsvendorSpec& spec, std::int64_t t, std::int64_t a, std::int64_t d);

/// (min(d, a') - min(d, 0)) C_s - a' C_p; equals Rew_t(a' + F_t, d) - Rew_t(F_t, d) for every t.
double shaped_reward(const NewsvendorSpec& spec, std::int64_t a_prime, std::int64_t d);

std::string day_state(std::int64_t t);
std::string order_action(std::int64_t a);

/// Successor of day t in a horizon-T truncation: t + 1, except the last day
/// which returns to T - L (itself when T < L). This keeps the successor of
/// every day in residue class (t + 1) mod L.
std::int64_t successor_day(std::int64_t t, std::int64_t horizon, std::int64_t cycle_length);

/// M: states s_0..s_{T-1}, actions F_t + Z_delta, rewards aggregated over D(r,t,a).
/// Throws HorizonError unless 1 <= horizon <= forecasts.size().
FiniteMdp build_original(const NewsvendorSpec& spec, std::int64_t horizon, double tol = kTolerance);

/// opt_det(s_t) = F_t.
Policy deterministic_optimal(const NewsvendorSpec& spec, const FiniteMdp& original);

/// M': rewards Rew_t(a,d) - Rew_t(F_t,d). Throws StructureMismatchError if the
/// result does not share the original's transition structure.
FiniteMdp shape(const NewsvendorSpec& spec, const FiniteMdp& original, double tol = kTolerance);

struct Relabeled {
    FiniteMdp mdp;
    Relabeling relabeling;
};

/// M'': f = id, g_{s_t}(a) = a - F_t, so every day offers Z_delta.
Relabeled relabel(const NewsvendorSpec& spec, const FiniteMdp& shaped, double tol = kTolerance);

/// Days with equal t mod L form a block; pairs with equal (t mod L, a') form a block.
/// Throws SymmetryConstructionError when the result is not a simple visible symmetry.
VisibleSymmetry construct_symmetry(const NewsvendorSpec& spec, const FiniteMdp& relabeled, double tol = kTolerance);

/// Output of the six-step reduction.
struct ReductionResult {
    NewsvendorSpec spec;
    std::int64_t horizon = 0;
    FiniteMdp original;
    FiniteMdp shaped;
    FiniteMdp relabeled;
    Relabeling relabeling;
    HiddenSymmetry hidden_symmetry;
    Quotient quotient;
    /// Lambda(pi)(a | s_t) = pi(a - F_t | [s_t]).
    std::function<Policy(const Policy&)> pullback;

    Index quotient_states() const { return quotient.mdp.num_states(); }
};

/// Runs every step and every embedded check; propagates the first failure.
ReductionResult reduce(const NewsvendorSpec& spec, std::int64_t horizon, double tol = kTolerance);

/// Offset a' chosen by a deterministic quotient policy, per quotient state.
std::vector<std::int64_t> quotient_offsets(const ReductionResult& r, const Policy& quotient_policy);

/// O_t = F_t + offset(t mod L), the deterministic form of Lambda.
std::vector<std::int64_t> pulled_back_orders(const ReductionResult& r, const std::vector<std::int64_t>& offsets);

/// Orders chosen by a deterministic policy on the original MDP.
std::vector<std::int64_t> orders_of(const FiniteMdp& original, const Policy& policy);

using RewardFunction = std::function<double(std::int64_t t, std::int64_t a, std::int64_t d)>;

struct RewardConditionResult {
    bool holds = false;
    std::optional<std::int64_t> x;
    std::string violation;
};

/**
 * Searches x in Z_delta (ascending) such that x + F_t maximizes rew(t, ., 0)
 * for every t < horizon and
 *   rew(t, a, d) - rew(t, x + F_t, d) = rew(l, a - F_t + F_l, d) - rew(l, x + F_l, d)
 * for all t, l < horizon, a in F_t + Z_delta, d in Z_delta.
 */
RewardConditionResult check_reward_condition(const NewsvendorSpec& spec, const RewardFunction& rew,
                                             std::int64_t horizon, double tol = kTolerance);

/// The profit reward as a RewardFunction.
RewardFunction profit_reward(const NewsvendorSpec& spec);

}  // namespace nvq
