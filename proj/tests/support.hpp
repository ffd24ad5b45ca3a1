// Generators and brute-force oracles shared by the unit and acceptance tests.
// Oracles deliberately avoid the library's solvers: values come from dense
// linear solves over every deterministic policy, or straight from the
// newsvendor formulas.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvq/mdp.hpp"
#include "nvq/newsvendor.hpp"
#include "nvq/symmetry.hpp"

namespace nvq::test {

using Gen = std::mt19937_64;

inline std::int64_t uniform_int(Gen& g, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

/// Positive integer weights normalized to one.
inline std::vector<double> random_distribution(Gen& g, std::size_t n, std::int64_t max_weight = 20) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = static_cast<double>(uniform_int(g, 1, max_weight)));
    for (auto& x : w) x /= total;
    return w;
}

struct MdpParts {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<StateAction> admissible;
    std::map<StateAction, std::vector<Outcome>> dynamics;

    FiniteMdp build() const { return make_mdp(states, actions, admissible, dynamics); }
};

inline MdpParts decompose(const FiniteMdp& m) {
    MdpParts parts{m.states(), m.actions(), {}, {}};
    for (Index p = 0; p < m.num_pairs(); ++p) {
        StateAction key{m.state_label(m.pair_state(p)), m.action_label(m.pair_action(p))};
        parts.admissible.push_back(key);
        for (const auto& o : m.outcomes(p)) parts.dynamics[key].push_back({m.state_label(o.next), o.reward, o.prob});
    }
    return parts;
}

/// Random MDP: states "s<i>", actions "a<j>", integer rewards in [-5, 5].
inline MdpParts random_mdp_parts(Gen& g, int num_states, int max_actions, int max_outcomes = 3) {
    MdpParts parts;
    for (int i = 0; i < num_states; ++i) parts.states.push_back("s" + std::to_string(i));
    for (int j = 0; j < max_actions; ++j) parts.actions.push_back("a" + std::to_string(j));
    for (const auto& s : parts.states) {
        std::vector<std::string> acts = parts.actions;
        std::shuffle(acts.begin(), acts.end(), g);
        acts.resize(uniform_int(g, 1, max_actions));
        std::sort(acts.begin(), acts.end());
        for (const auto& a : acts) {
            StateAction key{s, a};
            parts.admissible.push_back(key);
            std::set<std::pair<std::string, double>> used;
            const auto n = static_cast<std::size_t>(uniform_int(g, 1, max_outcomes));
            while (used.size() < n)
                used.emplace(parts.states[uniform_int(g, 0, num_states - 1)],
                             static_cast<double>(uniform_int(g, -5, 5)));
            const auto probs = random_distribution(g, n);
            std::size_t k = 0;
            for (const auto& [next, r] : used) parts.dynamics[key].push_back({next, r, probs[k++]});
        }
    }
    return parts;
}

inline FiniteMdp random_mdp(Gen& g, int num_states, int max_actions, int max_outcomes = 3) {
    return random_mdp_parts(g, num_states, max_actions, max_outcomes).build();
}

inline FiniteMdp shift_rewards(const FiniteMdp& m, double c) {
    auto parts = decompose(m);
    for (auto& [key, outs] : parts.dynamics)
        for (auto& o : outs) o.reward += c;
    return parts.build();
}

/// Exact values of a deterministic policy: (I - gamma P) V = r by dense LU.
inline Eigen::VectorXd dense_values(const FiniteMdp& m, const std::vector<Index>& pair_of_state, double gamma) {
    const Index n = m.num_states();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    for (Index s = 0; s < n; ++s)
        for (const auto& o : m.outcomes(pair_of_state[s])) {
            r(s) += o.prob * o.reward;
            a(s, o.next) -= gamma * o.prob;
        }
    return a.partialPivLu().solve(r);
}

struct BruteForce {
    Eigen::VectorXd values;                    // V_* per state
    std::vector<std::vector<Index>> actions;   // optimal action indices per state, ascending
};

/// V_* by enumerating every deterministic policy; optimal sets from the
/// one-step lookahead on V_* with tolerance `tol`.
inline BruteForce brute_force(const FiniteMdp& m, double gamma, double tol = 1e-9) {
    const Index n = m.num_states();
    BruteForce out;
    out.values = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    std::vector<Index> choice(n);
    for (Index s = 0; s < n; ++s) choice[s] = m.pair_begin(s);
    while (true) {
        out.values = out.values.cwiseMax(dense_values(m, choice, gamma));
        Index s = 0;
        while (s < n && ++choice[s] == m.pair_end(s)) {
            choice[s] = m.pair_begin(s);
            ++s;
        }
        if (s == n) break;
    }
    out.actions.resize(n);
    for (Index s = 0; s < n; ++s) {
        std::vector<std::pair<Index, double>> q;
        double best = -std::numeric_limits<double>::infinity();
        for (Index p = m.pair_begin(s); p < m.pair_end(s); ++p) {
            double v = 0.0;
            for (const auto& o : m.outcomes(p)) v += o.prob * (o.reward + gamma * out.values(o.next));
            q.emplace_back(m.pair_action(p), v);
            best = std::max(best, v);
        }
        for (const auto& [a, v] : q)
            if (v >= best - tol) out.actions[s].push_back(a);
        std::sort(out.actions[s].begin(), out.actions[s].end());
    }
    return out;
}

/// All deterministic policies that pick from the given per-state action sets.
template <typename Visit>
void for_each_selection(const std::vector<std::vector<Index>>& sets, Visit visit) {
    std::vector<std::size_t> pos(sets.size(), 0);
    std::vector<Index> pick(sets.size());
    while (true) {
        for (std::size_t i = 0; i < sets.size(); ++i) pick[i] = sets[i][pos[i]];
        visit(pick);
        std::size_t i = 0;
        while (i < sets.size() && ++pos[i] == sets[i].size()) pos[i++] = 0;
        if (i == sets.size()) return;
    }
}

/// A planted simple symmetry: every base state is copied `copies` times, and
/// each outcome's probability is split at random across the copies of its
/// successor. The returned block maps group the copies of each base state.
struct Planted {
    FiniteMdp mdp;
    VisibleSymmetry symmetry;
};

inline Planted planted_symmetry(Gen& g, int base_states, int copies, int max_actions) {
    const auto base = random_mdp_parts(g, base_states, max_actions);
    MdpParts parts;
    parts.actions = base.actions;
    auto copy_label = [](const std::string& s, int c) { return s + "_" + std::to_string(c); };
    for (int c = 0; c < copies; ++c)
        for (const auto& s : base.states) parts.states.push_back(copy_label(s, c));
    for (const auto& [s, a] : base.admissible)
        for (int c = 0; c < copies; ++c) {
            StateAction key{copy_label(s, c), a};
            parts.admissible.push_back(key);
            for (const auto& o : base.dynamics.at({s, a})) {
                const auto split = random_distribution(g, copies);
                for (int k = 0; k < copies; ++k) parts.dynamics[key].push_back({copy_label(o.next, k), o.reward, o.prob * split[k]});
            }
        }
    Planted out{parts.build(), {}};
    std::map<std::string, Index> state_block;
    std::map<StateAction, Index> pair_block;
    std::map<std::string, Index> base_index;
    for (std::size_t i = 0; i < base.states.size(); ++i) base_index[base.states[i]] = static_cast<Index>(i);
    for (std::size_t i = 0; i < base.admissible.size(); ++i) {
        const auto& [s, a] = base.admissible[i];
        for (int c = 0; c < copies; ++c) {
            state_block[copy_label(s, c)] = base_index[s];
            pair_block[{copy_label(s, c), a}] = static_cast<Index>(i);
        }
    }
    out.symmetry = make_symmetry(out.mdp, state_block, pair_block);
    return out;
}

struct SpecShape {
    std::int64_t min_horizon = 3;
    std::int64_t max_horizon = 60;
    std::vector<std::int64_t> support_sizes = {3, 5, 7, 9};
    std::int64_t cycle_length = 1;
    bool contiguous_support = true;
};

/// Random newsvendor spec; forecasts are large enough that F_t + d >= 0.
inline NewsvendorSpec random_spec(Gen& g, const SpecShape& shape = {}) {
    NewsvendorSpec spec;
    const auto n = shape.support_sizes[uniform_int(g, 0, static_cast<std::int64_t>(shape.support_sizes.size()) - 1)];
    if (shape.contiguous_support) {
        const std::int64_t lo = -(n / 2) + uniform_int(g, -1, 1);
        for (std::int64_t i = 0; i < n; ++i) spec.deviation_support.push_back(lo + i);
    } else {
        std::set<std::int64_t> support;
        while (static_cast<std::int64_t>(support.size()) < n) support.insert(uniform_int(g, -8, 8));
        spec.deviation_support.assign(support.begin(), support.end());
    }
    const std::int64_t horizon = uniform_int(g, shape.min_horizon, shape.max_horizon);
    const std::int64_t floor = std::max<std::int64_t>(0, -spec.deviation_support.front());
    for (std::int64_t t = 0; t < horizon; ++t) spec.forecasts.push_back(uniform_int(g, floor, floor + 60));
    for (std::int64_t k = 0; k < shape.cycle_length; ++k)
        spec.deviation_probs.push_back(random_distribution(g, static_cast<std::size_t>(n)));
    if (shape.cycle_length > 1 && uniform_int(g, 0, 3) == 0) spec.deviation_probs.resize(1);
    spec.cycle_length = shape.cycle_length;
    spec.purchase_cost = static_cast<double>(uniform_int(g, 1, 40)) / 4.0;
    spec.selling_price = spec.purchase_cost + static_cast<double>(uniform_int(g, 1, 40)) / 4.0;
    return spec;
}

/// Per-day optimal orders straight from the profit formula, ascending.
inline std::vector<std::vector<std::int64_t>> newsvendor_argmax(const NewsvendorSpec& spec, std::int64_t horizon,
                                                                double tol = 1e-9) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::int64_t t = 0; t < horizon; ++t) {
        const auto& probs = spec.deviation_probs.size() == 1 ? spec.deviation_probs[0]
                                                              : spec.deviation_probs[t % spec.cycle_length];
        std::vector<double> value;
        for (std::int64_t x : spec.deviation_support) {
            const std::int64_t a = spec.forecasts[t] + x;
            double v = 0.0;
            for (std::size_t i = 0; i < probs.size(); ++i) {
                const auto demand = spec.forecasts[t] + spec.deviation_support[i];
                v += probs[i] * (static_cast<double>(std::min(demand, a)) * spec.selling_price -
                                 static_cast<double>(a) * spec.purchase_cost);
            }
            value.push_back(v);
        }
        const double best = *std::max_element(value.begin(), value.end());
        std::vector<std::int64_t> day;
        for (std::size_t i = 0; i < value.size(); ++i)
            if (value[i] >= best - tol) day.push_back(spec.forecasts[t] + spec.deviation_support[i]);
        out.push_back(day);
    }
    return out;
}

}  // namespace nvq::test
