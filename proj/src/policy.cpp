#include "nvq/policy.hpp"

#include <cmath>
#include <string>

#include "nvq/errors.hpp"

namespace nvq {

Policy::Policy(const FiniteMdp& mdp, Eigen::VectorXd probs, double tol) : probs_(std::move(probs)) {
    if (probs_.size() != mdp.num_pairs())
        throw InvalidPolicyError("policy has " + std::to_string(probs_.size()) + " entries, MDP has " +
                                 std::to_string(mdp.num_pairs()) + " admissible pairs");
    for (Index s = 0; s < mdp.num_states(); ++s) {
        double total = 0.0;
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p) {
            if (!(probs_(p) >= -tol && probs_(p) <= 1.0 + tol))
                throw InvalidPolicyError("probability outside [0,1] at state '" + mdp.state_label(s) + "'");
            total += probs_(p);
        }
        if (std::abs(total - 1.0) > tol)
            throw InvalidPolicyError("probabilities at state '" + mdp.state_label(s) + "' sum to " +
                                     std::to_string(total));
    }
}

Policy Policy::deterministic(const FiniteMdp& mdp, const std::vector<Index>& action_of_state) {
    if (static_cast<Index>(action_of_state.size()) != mdp.num_states())
        throw InvalidPolicyError("deterministic policy must name one action per state");
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(mdp.num_pairs());
    for (Index s = 0; s < mdp.num_states(); ++s) probs(mdp.pair_index(s, action_of_state[s])) = 1.0;
    return Policy(mdp, std::move(probs));
}

Policy Policy::uniform(const FiniteMdp& mdp) {
    Eigen::VectorXd probs(mdp.num_pairs());
    for (Index s = 0; s < mdp.num_states(); ++s)
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p)
            probs(p) = 1.0 / static_cast<double>(mdp.num_admissible(s));
    return Policy(mdp, std::move(probs));
}

Policy Policy::uniform_over(const FiniteMdp& mdp, const std::vector<std::vector<Index>>& actions) {
    if (static_cast<Index>(actions.size()) != mdp.num_states())
        throw InvalidPolicyError("action sets must cover every state");
    Eigen::VectorXd probs = Eigen::VectorXd::Zero(mdp.num_pairs());
    for (Index s = 0; s < mdp.num_states(); ++s) {
        if (actions[s].empty()) throw InvalidPolicyError("empty action set at '" + mdp.state_label(s) + "'");
        for (Index a : actions[s]) probs(mdp.pair_index(s, a)) = 1.0 / static_cast<double>(actions[s].size());
    }
    return Policy(mdp, std::move(probs));
}

Policy Policy::from_labels(const FiniteMdp& mdp, const std::map<StateAction, double>& probs, double tol) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_pairs());
    for (const auto& [key, prob] : probs) v(mdp.pair_index(key.first, key.second)) = prob;
    return Policy(mdp, std::move(v), tol);
}

double Policy::prob(const FiniteMdp& mdp, std::string_view s, std::string_view a) const {
    require_policy_for(mdp, *this);
    return probs_(mdp.pair_index(s, a));
}

bool Policy::is_deterministic() const {
    return (probs_.array() == 0.0 || probs_.array() == 1.0).all();
}

std::optional<Index> Policy::deterministic_action(const FiniteMdp& mdp, Index s) const {
    for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p)
        if (probs_(p) == 1.0) return mdp.pair_action(p);
    return std::nullopt;
}

void require_policy_for(const FiniteMdp& mdp, const Policy& policy) {
    if (policy.size() != mdp.num_pairs())
        throw InvalidPolicyError("policy does not match the MDP's admissible pairs");
}

bool approx_equal(const Policy& a, const Policy& b, double tol) {
    if (a.size() != b.size()) return false;
    return a.size() == 0 || (a.probs() - b.probs()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nvq
