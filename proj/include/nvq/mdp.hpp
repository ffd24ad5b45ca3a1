#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace nvq {

using Index = std::ptrdiff_t;

/// Absolute tolerance for probability equality and argmax ties.
inline constexpr double kTolerance = 1e-9;

using StateAction = std::pair<std::string, std::string>;

/// One entry of p(s', r | s, a), addressed by label.
struct Outcome {
    std::string next;
    double reward;
    double prob;
};

/// One entry of p(s', r | s, a), addressed by state index.
struct Transition {
    Index next;
    double reward;
    double prob;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/**
 * Explicit tabular MDP (S, A, Psi, R, p).
 *
 * States and actions are ordered sets of opaque labels. Admissible pairs are
 * stored contiguously per state (CSR layout), so a pair index enumerates Psi
 * in (state position, action position) order. Dynamics hold only
 * positive-probability outcomes, with (s', r) duplicates merged.
 *
 * Instances are immutable once built; construct them with make_mdp().
 */
class FiniteMdp {
public:
    FiniteMdp() = default;

    Index num_states() const { return static_cast<Index>(states_.size()); }
    Index num_actions() const { return static_cast<Index>(actions_.size()); }
    Index num_pairs() const { return static_cast<Index>(pair_state_.size()); }

    const std::vector<std::string>& states() const { return states_; }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::string& state_label(Index s) const { return states_[s]; }
    const std::string& action_label(Index a) const { return actions_[a]; }

    std::optional<Index> find_state(std::string_view label) const;
    std::optional<Index> find_action(std::string_view label) const;
    /// Throws DanglingReferenceError for unknown labels.
    Index state_index(std::string_view label) const;
    Index action_index(std::string_view label) const;

    /// Pair indices admissible at state s, contiguous.
    Index pair_begin(Index s) const { return state_offsets_[s]; }
    Index pair_end(Index s) const { return state_offsets_[s + 1]; }
    Index num_admissible(Index s) const { return pair_end(s) - pair_begin(s); }

    Index pair_state(Index p) const { return pair_state_[p]; }
    Index pair_action(Index p) const { return pair_action_[p]; }
    std::optional<Index> find_pair(Index s, Index a) const;
    /// Throws InadmissiblePairError.
    Index pair_index(Index s, Index a) const;
    Index pair_index(std::string_view s, std::string_view a) const;

    std::span<const Transition> outcomes(Index p) const { return outcomes_[p]; }

    /// Distinct reward values appearing in the dynamics, ascending.
    const std::vector<double>& rewards() const { return rewards_; }

private:
    friend FiniteMdp make_mdp(std::vector<std::string>, std::vector<std::string>,
                              const std::vector<StateAction>&,
                              const std::map<StateAction, std::vector<Outcome>>&, double);

    std::vector<std::string> states_;
    std::vector<std::string> actions_;
    std::unordered_map<std::string, Index> state_lookup_;
    std::unordered_map<std::string, Index> action_lookup_;
    std::vector<Index> state_offsets_;
    std::vector<Index> pair_state_;
    std::vector<Index> pair_action_;
    std::vector<std::vector<Transition>> outcomes_;
    std::vector<double> rewards_;
};

/**
 * Builds and validates a FiniteMdp.
 *
 * Throws NormalizationError when a pair's probabilities leave [0,1] or do not
 * sum to one within `tol`, OrphanStateError for a state without admissible
 * actions, DanglingReferenceError for unknown labels, and InadmissiblePairError
 * for dynamics keyed on a pair outside `admissible`.
 */
FiniteMdp make_mdp(std::vector<std::string> states, std::vector<std::string> actions,
                   const std::vector<StateAction>& admissible,
                   const std::map<StateAction, std::vector<Outcome>>& dynamics,
                   double tol = kTolerance);

/// p(s'|s,a), summed over rewards.
double transition_prob(const FiniteMdp& mdp, Index s_next, Index pair);
double transition_prob(const FiniteMdp& mdp, std::string_view s_next, std::string_view s,
                       std::string_view a);

/// R(s,a) = sum r p(s',r|s,a).
double expected_reward(const FiniteMdp& mdp, Index pair);
double expected_reward(const FiniteMdp& mdp, std::string_view s, std::string_view a);

/// R(s,a) for every pair, in pair order.
Eigen::VectorXd expected_rewards(const FiniteMdp& mdp);

/// Pair-by-state matrix of p(s'|s,a).
Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const FiniteMdp& mdp);

/// Next-state distribution of a pair as (state, prob), states ascending.
std::vector<std::pair<Index, double>> next_state_distribution(const FiniteMdp& mdp, Index pair);

/// Merges rewards closer than `tol` (keeping the smallest) and sums their probabilities.
std::vector<std::pair<double, double>> aggregate_rewards(std::vector<std::pair<double, double>> reward_probs,
                                                         double tol = kTolerance);

}  // namespace nvq
