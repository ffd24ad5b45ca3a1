#include "nvq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "nvq/errors.hpp"

namespace nvq {

namespace {

std::string pair_name(std::string_view s, std::string_view a) {
    std::string out = "(";
    out.append(s);
    out += ", ";
    out.append(a);
    out += ")";
    return out;
}

}  // namespace

std::optional<Index> FiniteMdp::find_state(std::string_view label) const {
    auto it = state_lookup_.find(std::string(label));
    if (it == state_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<Index> FiniteMdp::find_action(std::string_view label) const {
    auto it = action_lookup_.find(std::string(label));
    if (it == action_lookup_.end()) return std::nullopt;
    return it->second;
}

Index FiniteMdp::state_index(std::string_view label) const {
    if (auto s = find_state(label)) return *s;
    throw DanglingReferenceError("unknown state '" + std::string(label) + "'");
}

Index FiniteMdp::action_index(std::string_view label) const {
    if (auto a = find_action(label)) return *a;
    throw DanglingReferenceError("unknown action '" + std::string(label) + "'");
}

std::optional<Index> FiniteMdp::find_pair(Index s, Index a) const {
    auto first = pair_action_.begin() + pair_begin(s);
    auto last = pair_action_.begin() + pair_end(s);
    auto it = std::lower_bound(first, last, a);
    if (it == last || *it != a) return std::nullopt;
    return static_cast<Index>(it - pair_action_.begin());
}

Index FiniteMdp::pair_index(Index s, Index a) const {
    if (auto p = find_pair(s, a)) return *p;
    throw InadmissiblePairError("pair " + pair_name(states_[s], actions_[a]) + " is not admissible");
}

Index FiniteMdp::pair_index(std::string_view s, std::string_view a) const {
    auto si = find_state(s);
    auto ai = find_action(a);
    if (!si || !ai) throw InadmissiblePairError("pair " + pair_name(s, a) + " is not admissible");
    return pair_index(*si, *ai);
}

FiniteMdp make_mdp(std::vector<std::string> states, std::vector<std::string> actions,
                   const std::vector<StateAction>& admissible,
                   const std::map<StateAction, std::vector<Outcome>>& dynamics, double tol) {
    FiniteMdp m;
    m.states_ = std::move(states);
    m.actions_ = std::move(actions);
    for (Index i = 0; i < m.num_states(); ++i) {
        if (!m.state_lookup_.emplace(m.states_[i], i).second)
            throw Error("duplicate state label '" + m.states_[i] + "'");
    }
    for (Index i = 0; i < m.num_actions(); ++i) {
        if (!m.action_lookup_.emplace(m.actions_[i], i).second)
            throw Error("duplicate action label '" + m.actions_[i] + "'");
    }

    std::set<std::pair<Index, Index>> pairs;
    for (const auto& [s, a] : admissible) {
        auto si = m.find_state(s);
        if (!si) throw DanglingReferenceError("admissible pair names unknown state '" + s + "'");
        auto ai = m.find_action(a);
        if (!ai) throw DanglingReferenceError("admissible pair names unknown action '" + a + "'");
        pairs.emplace(*si, *ai);
    }

    m.state_offsets_.assign(m.states_.size() + 1, 0);
    for (const auto& [s, a] : pairs) {
        m.pair_state_.push_back(s);
        m.pair_action_.push_back(a);
        ++m.state_offsets_[s + 1];
    }
    for (Index s = 0; s < m.num_states(); ++s) {
        if (m.state_offsets_[s + 1] == 0)
            throw OrphanStateError("state '" + m.states_[s] + "' has no admissible action");
        m.state_offsets_[s + 1] += m.state_offsets_[s];
    }

    for (const auto& [key, _] : dynamics) {
        auto si = m.find_state(key.first);
        auto ai = m.find_action(key.second);
        if (!si || !ai || !pairs.contains({*si, *ai}))
            throw InadmissiblePairError("dynamics given for non-admissible pair " +
                                        pair_name(key.first, key.second));
    }

    std::set<double> reward_values;
    m.outcomes_.resize(pairs.size());
    for (Index p = 0; p < m.num_pairs(); ++p) {
        const auto& s = m.states_[m.pair_state_[p]];
        const auto& a = m.actions_[m.pair_action_[p]];
        auto it = dynamics.find({s, a});
        if (it == dynamics.end())
            throw NormalizationError("pair " + pair_name(s, a) + " has no dynamics");

        std::map<std::pair<Index, double>, double> merged;
        double total = 0.0;
        for (const auto& o : it->second) {
            auto next = m.find_state(o.next);
            if (!next)
                throw DanglingReferenceError("pair " + pair_name(s, a) + " transitions to unknown state '" +
                                             o.next + "'");
            if (!std::isfinite(o.reward))
                throw NormalizationError("pair " + pair_name(s, a) + " has a non-finite reward");
            if (!(o.prob >= -tol && o.prob <= 1.0 + tol))
                throw NormalizationError("pair " + pair_name(s, a) + " has probability outside [0,1]");
            total += o.prob;
            if (o.prob > 0.0) merged[{*next, o.reward}] += o.prob;
        }
        if (std::abs(total - 1.0) > tol)
            throw NormalizationError("probabilities of pair " + pair_name(s, a) + " sum to " +
                                     std::to_string(total) + ", not 1");
        auto& row = m.outcomes_[p];
        for (const auto& [key, prob] : merged) {
            row.push_back({key.first, key.second, prob});
            reward_values.insert(key.second);
        }
    }
    m.rewards_.assign(reward_values.begin(), reward_values.end());
    return m;
}

double transition_prob(const FiniteMdp& mdp, Index s_next, Index pair) {
    double total = 0.0;
    for (const auto& t : mdp.outcomes(pair))
        if (t.next == s_next) total += t.prob;
    return total;
}

double transition_prob(const FiniteMdp& mdp, std::string_view s_next, std::string_view s,
                       std::string_view a) {
    const Index p = mdp.pair_index(s, a);
    return transition_prob(mdp, mdp.state_index(s_next), p);
}

double expected_reward(const FiniteMdp& mdp, Index pair) {
    double total = 0.0;
    for (const auto& t : mdp.outcomes(pair)) total += t.reward * t.prob;
    return total;
}

double expected_reward(const FiniteMdp& mdp, std::string_view s, std::string_view a) {
    return expected_reward(mdp, mdp.pair_index(s, a));
}

Eigen::VectorXd expected_rewards(const FiniteMdp& mdp) {
    Eigen::VectorXd r(mdp.num_pairs());
    for (Index p = 0; p < mdp.num_pairs(); ++p) r(p) = expected_reward(mdp, p);
    return r;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> transition_matrix(const FiniteMdp& mdp) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index p = 0; p < mdp.num_pairs(); ++p)
        for (const auto& t : mdp.outcomes(p)) triplets.emplace_back(p, t.next, t.prob);
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(mdp.num_pairs(), mdp.num_states());
    m.setFromTriplets(triplets.begin(), triplets.end());  // sums duplicates across rewards
    return m;
}

std::vector<std::pair<Index, double>> next_state_distribution(const FiniteMdp& mdp, Index pair) {
    std::map<Index, double> acc;
    for (const auto& t : mdp.outcomes(pair)) acc[t.next] += t.prob;
    return {acc.begin(), acc.end()};
}

std::vector<std::pair<double, double>> aggregate_rewards(std::vector<std::pair<double, double>> reward_probs,
                                                         double tol) {
    std::sort(reward_probs.begin(), reward_probs.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [r, p] : reward_probs) {
        if (!out.empty() && std::abs(r - out.back().first) <= tol)
            out.back().second += p;
        else
            out.emplace_back(r, p);
    }
    return out;
}

}  // namespace nvq
