#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nvq/mdp.hpp"

namespace nvq {

/**
 * Stochastic policy pi(a|s) over the admissible pairs of one MDP.
 *
 * Probabilities are stored per pair index of the MDP the policy was built
 * for. Every constructor validates against that MDP; functions that accept a
 * (mdp, policy) combination reject policies whose pair count differs.
 */
class Policy {
public:
    Policy() = default;
    /// Throws InvalidPolicyError unless every state's row sums to one within `tol`.
    Policy(const FiniteMdp& mdp, Eigen::VectorXd probs, double tol = kTolerance);

    static Policy deterministic(const FiniteMdp& mdp, const std::vector<Index>& action_of_state);
    static Policy uniform(const FiniteMdp& mdp);
    /// Uniform over the given per-state action sets.
    static Policy uniform_over(const FiniteMdp& mdp, const std::vector<std::vector<Index>>& actions);
    /// Missing pairs get probability zero.
    static Policy from_labels(const FiniteMdp& mdp, const std::map<StateAction, double>& probs,
                              double tol = kTolerance);

    Index size() const { return probs_.size(); }
    double operator[](Index pair) const { return probs_(pair); }
    const Eigen::VectorXd& probs() const { return probs_; }

    double prob(const FiniteMdp& mdp, std::string_view s, std::string_view a) const;

    bool is_deterministic() const;
    /// Action index chosen at s, when the row is a point mass.
    std::optional<Index> deterministic_action(const FiniteMdp& mdp, Index s) const;

private:
    Eigen::VectorXd probs_;
};

/// Throws InvalidPolicyError when `policy` was not built for an MDP shaped like `mdp`.
void require_policy_for(const FiniteMdp& mdp, const Policy& policy);

bool approx_equal(const Policy& a, const Policy& b, double tol = kTolerance);

}  // namespace nvq
