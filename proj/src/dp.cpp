#include "nvq/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nvq/errors.hpp"
#include "nvq/random.hpp"

namespace nvq {

namespace {

constexpr long kMaxSweeps = 10'000'000;

void require_discount(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw DiscountRangeError("discount factor must lie in [0,1), got " + std::to_string(gamma));
}

double stopping_threshold(double gamma, double epsilon) {
    return epsilon * (1.0 - gamma) / (2.0 * gamma);
}

// P_pi(s, s') = sum_a pi(a|s) p(s'|s,a).
Eigen::SparseMatrix<double, Eigen::RowMajor> policy_matrix(const FiniteMdp& mdp, const Policy& policy) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (Index p = 0; p < mdp.num_pairs(); ++p) {
        if (policy[p] == 0.0) continue;
        for (const auto& t : mdp.outcomes(p)) triplets.emplace_back(mdp.pair_state(p), t.next, policy[p] * t.prob);
    }
    Eigen::SparseMatrix<double, Eigen::RowMajor> m(mdp.num_states(), mdp.num_states());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

ValueTable one_step_values(const FiniteMdp& mdp, const Policy& policy) {
    ValueTable v(mdp.num_states());
    for (Index s = 0; s < mdp.num_states(); ++s) {
        double acc = 0.0;
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p) acc += policy[p] * expected_reward(mdp, p);
        v(s) = acc;
    }
    return v;
}

ValueTable max_per_state(const FiniteMdp& mdp, const Eigen::VectorXd& q) {
    ValueTable v(mdp.num_states());
    for (Index s = 0; s < mdp.num_states(); ++s)
        v(s) = q.segment(mdp.pair_begin(s), mdp.num_admissible(s)).maxCoeff();
    return v;
}

}  // namespace

ValueTable evaluate_policy(const FiniteMdp& mdp, const Policy& policy, double gamma, double epsilon) {
    require_discount(gamma);
    require_policy_for(mdp, policy);
    const ValueTable r_pi = one_step_values(mdp, policy);
    if (gamma == 0.0) return r_pi;
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");

    const auto p_pi = policy_matrix(mdp, policy);
    const double threshold = stopping_threshold(gamma, epsilon);
    ValueTable v = r_pi;
    for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
        ValueTable next = r_pi + gamma * (p_pi * v);
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (change < threshold) break;
    }
    return v;
}

OptimalActionSets optimal_policy_set(const FiniteMdp& mdp, double gamma, double epsilon, double tol) {
    require_discount(gamma);
    const Eigen::VectorXd r = expected_rewards(mdp);
    Eigen::VectorXd q = r;
    double gap = tol;
    if (gamma > 0.0) {
        if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
        const auto p = transition_matrix(mdp);
        const double threshold = stopping_threshold(gamma, epsilon);
        ValueTable v = max_per_state(mdp, r);
        for (long sweep = 0; sweep < kMaxSweeps; ++sweep) {
            ValueTable next = max_per_state(mdp, r + gamma * (p * v));
            const double change = (next - v).cwiseAbs().maxCoeff();
            v = std::move(next);
            if (change < threshold) break;
        }
        q = r + gamma * (p * v);
        gap = std::max(epsilon, tol);
    }

    OptimalActionSets out;
    out.values = max_per_state(mdp, q);
    out.actions.resize(mdp.num_states());
    for (Index s = 0; s < mdp.num_states(); ++s)
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p)
            if (q(p) >= out.values(s) - gap) out.actions[s].push_back(mdp.pair_action(p));
    return out;
}

bool same_optimal_sets(const FiniteMdp& a, const OptimalActionSets& sa, const FiniteMdp& b,
                       const OptimalActionSets& sb, Index* witness_state) {
    auto fail = [&](Index s) {
        if (witness_state) *witness_state = s;
        return false;
    };
    if (a.num_states() != b.num_states()) return fail(-1);
    for (Index s = 0; s < a.num_states(); ++s) {
        auto t = b.find_state(a.state_label(s));
        if (!t) return fail(s);
        std::vector<std::string> la, lb;
        for (Index x : sa.actions[s]) la.push_back(a.action_label(x));
        for (Index x : sb.actions[*t]) lb.push_back(b.action_label(x));
        std::sort(la.begin(), la.end());
        std::sort(lb.begin(), lb.end());
        if (la != lb) return fail(s);
    }
    return true;
}

EpisodeTrace sample_trace(const FiniteMdp& mdp, const Policy& policy, Index start_state, Index num_steps,
                          std::uint64_t seed) {
    require_policy_for(mdp, policy);
    if (start_state < 0 || start_state >= mdp.num_states()) throw DanglingReferenceError("start state out of range");
    if (num_steps < 0) throw Error("num_steps must be non-negative");

    Rng rng(seed);
    EpisodeTrace trace;
    trace.states.push_back(start_state);
    Index s = start_state;
    for (Index k = 0; k < num_steps; ++k) {
        if (mdp.num_admissible(s) == 0)
            throw AbsorbingDeadEndError("state '" + mdp.state_label(s) + "' has no admissible action");
        const Index offset = sample_categorical(
            rng, std::span<const double>(policy.probs().data() + mdp.pair_begin(s), mdp.num_admissible(s)),
            [](double w) { return w; });
        const Index p = mdp.pair_begin(s) + offset;
        const auto outs = mdp.outcomes(p);
        const Transition& t = outs[sample_categorical(rng, outs, [](const Transition& x) { return x.prob; })];
        trace.actions.push_back(mdp.pair_action(p));
        trace.rewards.push_back(t.reward);
        trace.states.push_back(t.next);
        s = t.next;
    }
    return trace;
}

}  // namespace nvq
