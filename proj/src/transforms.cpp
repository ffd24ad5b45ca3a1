#include "nvq/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nvq/dp.hpp"
#include "nvq/errors.hpp"
#include "text.hpp"

namespace nvq {

using detail::num;
using detail::pair_label;

namespace {

struct LabelledOutcome {
    std::string next;
    double reward;
    double prob;
};

// Outcomes of `pair` with next states renamed by `rename`, rewards merged within tol, sorted.
template <typename Rename>
std::vector<LabelledOutcome> labelled_outcomes(const FiniteMdp& mdp, Index pair, Rename rename, double tol) {
    std::map<std::string, std::vector<std::pair<double, double>>> by_state;
    for (const auto& t : mdp.outcomes(pair)) by_state[rename(mdp.state_label(t.next))].emplace_back(t.reward, t.prob);
    std::vector<LabelledOutcome> out;
    for (auto& [label, rp] : by_state)
        for (const auto& [r, p] : aggregate_rewards(std::move(rp), tol)) out.push_back({label, r, p});
    return out;
}

std::optional<std::string> compare_outcomes(const std::vector<LabelledOutcome>& x,
                                            const std::vector<LabelledOutcome>& y, double tol) {
    if (x.size() != y.size())
        return std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " distinct (s', r) outcomes";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].next != y[i].next || std::abs(x[i].reward - y[i].reward) > tol)
            return "outcome (" + x[i].next + ", " + num(x[i].reward) + ") vs (" + y[i].next + ", " +
                   num(y[i].reward) + ")";
        if (std::abs(x[i].prob - y[i].prob) > tol)
            return "outcome (" + x[i].next + ", " + num(x[i].reward) + "): probability " + num(x[i].prob) + " vs " +
                   num(y[i].prob);
    }
    return std::nullopt;
}

std::set<std::string> labels(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

const std::string* lookup(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

}  // namespace

Relabeling identity_relabeling(const FiniteMdp& mdp) {
    Relabeling h;
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const auto& label = mdp.state_label(s);
        h.state_map[label] = label;
        auto& g = h.action_maps[label];
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p) {
            const auto& a = mdp.action_label(mdp.pair_action(p));
            g[a] = a;
        }
    }
    return h;
}

Relabeling inverse(const Relabeling& h) {
    Relabeling inv;
    for (const auto& [s, fs] : h.state_map)
        if (!inv.state_map.emplace(fs, s).second) throw NotBijectiveError("f maps two states onto '" + fs + "'");
    for (const auto& [s, g] : h.action_maps) {
        const std::string* fs = lookup(h.state_map, s);
        if (!fs) throw CoverageError("g is given for state '" + s + "' outside the domain of f");
        auto& ginv = inv.action_maps[*fs];
        for (const auto& [a, ga] : g)
            if (!ginv.emplace(ga, a).second)
                throw NotBijectiveError("g_" + s + " maps two actions onto '" + ga + "'");
    }
    return inv;
}

CheckResult same_transition_structure(const FiniteMdp& a, const FiniteMdp& b, double tol) {
    if (labels(a.states()) != labels(b.states())) return CheckResult::fail("state sets differ");
    if (labels(a.actions()) != labels(b.actions())) return CheckResult::fail("action sets differ");
    if (a.num_pairs() != b.num_pairs()) return CheckResult::fail("admissible pair sets differ");
    for (Index p = 0; p < a.num_pairs(); ++p) {
        const auto& s = a.state_label(a.pair_state(p));
        const auto& act = a.action_label(a.pair_action(p));
        const Index sb = b.state_index(s);
        auto q = b.find_pair(sb, b.action_index(act));
        if (!q) return CheckResult::fail("pair " + pair_label(a, p) + " is not admissible in the second MDP");
        std::map<std::string, double> pa, pb;
        for (const auto& [next, prob] : next_state_distribution(a, p)) pa[a.state_label(next)] += prob;
        for (const auto& [next, prob] : next_state_distribution(b, *q)) pb[b.state_label(next)] += prob;
        for (const auto& [next, prob] : pa) {
            const double other = pb.contains(next) ? pb[next] : 0.0;
            if (std::abs(prob - other) > tol)
                return CheckResult::fail("p(" + next + " | " + s + ", " + act + ") = " + num(prob) + " vs " + num(other));
        }
        for (const auto& [next, prob] : pb)
            if (!pa.contains(next) && prob > tol)
                return CheckResult::fail("p(" + next + " | " + s + ", " + act + ") = 0 vs " + num(prob));
    }
    return CheckResult::pass();
}

CheckResult check_policy_invariant_shaping(const FiniteMdp& a, const FiniteMdp& b, double gamma, double tol) {
    if (auto structure = same_transition_structure(a, b, tol); !structure) return structure;
    const auto sa = optimal_policy_set(a, gamma, 1e-10, tol);
    const auto sb = optimal_policy_set(b, gamma, 1e-10, tol);
    Index witness = -1;
    if (!same_optimal_sets(a, sa, b, sb, &witness))
        return CheckResult::fail("optimal actions differ at state '" + a.state_label(witness) + "'");
    return CheckResult::pass();
}

FiniteMdp apply_relabeling(const FiniteMdp& mdp, const Relabeling& h, double tol) {
    for (const auto& [s, _] : h.state_map)
        if (!mdp.find_state(s)) throw CoverageError("f names unknown state '" + s + "'");
    for (const auto& [s, g] : h.action_maps) {
        auto si = mdp.find_state(s);
        if (!si) throw CoverageError("g names unknown state '" + s + "'");
        for (const auto& [a, _] : g) {
            auto ai = mdp.find_action(a);
            if (!ai || !mdp.find_pair(*si, *ai))
                throw CoverageError("g_" + s + " names non-admissible action '" + a + "'");
        }
    }

    std::vector<std::string> states;
    std::set<std::string> seen_states;
    std::vector<std::string> fs(mdp.num_states());
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const std::string* image = lookup(h.state_map, mdp.state_label(s));
        if (!image) throw CoverageError("f does not cover state '" + mdp.state_label(s) + "'");
        if (!seen_states.insert(*image).second) throw NotBijectiveError("f maps two states onto '" + *image + "'");
        fs[s] = *image;
        states.push_back(*image);
    }

    std::vector<std::string> actions;
    std::set<std::string> seen_actions;
    std::vector<StateAction> admissible;
    std::map<StateAction, std::vector<Outcome>> dynamics;
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const auto& label = mdp.state_label(s);
        auto g = h.action_maps.find(label);
        if (g == h.action_maps.end()) throw CoverageError("no action map for state '" + label + "'");
        std::set<std::string> images;
        for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p) {
            const auto& a = mdp.action_label(mdp.pair_action(p));
            const std::string* ga = lookup(g->second, a);
            if (!ga) throw CoverageError("g_" + label + " does not cover action '" + a + "'");
            if (!images.insert(*ga).second) throw NotBijectiveError("g_" + label + " maps two actions onto '" + *ga + "'");
            if (seen_actions.insert(*ga).second) actions.push_back(*ga);
            StateAction key{fs[s], *ga};
            admissible.push_back(key);
            auto& row = dynamics[key];
            for (const auto& t : mdp.outcomes(p)) row.push_back({fs[t.next], t.reward, t.prob});
        }
    }
    return make_mdp(std::move(states), std::move(actions), admissible, dynamics, tol);
}

CheckResult verify_relabeling(const FiniteMdp& a, const FiniteMdp& b, const Relabeling& h, double tol) {
    std::set<std::string> image;
    for (Index s = 0; s < a.num_states(); ++s) {
        const std::string* fs = lookup(h.state_map, a.state_label(s));
        if (!fs) return CheckResult::fail("f does not cover state '" + a.state_label(s) + "'");
        if (!b.find_state(*fs)) return CheckResult::fail("f maps '" + a.state_label(s) + "' outside the target states");
        if (!image.insert(*fs).second) return CheckResult::fail("f is not injective at '" + *fs + "'");
    }
    if (static_cast<Index>(image.size()) != b.num_states()) return CheckResult::fail("f is not onto the target states");

    auto rename = [&](const std::string& s) { return h.state_map.at(s); };
    for (Index s = 0; s < a.num_states(); ++s) {
        const auto& label = a.state_label(s);
        const Index tb = b.state_index(h.state_map.at(label));
        auto g = h.action_maps.find(label);
        if (g == h.action_maps.end()) return CheckResult::fail("no action map for state '" + label + "'");
        if (a.num_admissible(s) != b.num_admissible(tb))
            return CheckResult::fail("g_" + label + " cannot be a bijection: action counts differ");
        std::set<std::string> images;
        for (Index p = a.pair_begin(s); p < a.pair_end(s); ++p) {
            const auto& act = a.action_label(a.pair_action(p));
            const std::string* ga = lookup(g->second, act);
            if (!ga) return CheckResult::fail("g_" + label + " does not cover action '" + act + "'");
            if (!images.insert(*ga).second) return CheckResult::fail("g_" + label + " is not injective at '" + *ga + "'");
            auto ab = b.find_action(*ga);
            auto q = ab ? b.find_pair(tb, *ab) : std::nullopt;
            if (!q) return CheckResult::fail("g_" + label + "(" + act + ") = " + *ga + " is not admissible at the image state");
            auto mapped = labelled_outcomes(a, p, rename, tol);
            auto target = labelled_outcomes(b, *q, [](const std::string& x) { return x; }, tol);
            if (auto diff = compare_outcomes(mapped, target, tol))
                return CheckResult::fail("dynamics differ at " + pair_label(a, p) + " -> " + pair_label(b, *q) + ": " + *diff);
        }
    }
    return CheckResult::pass();
}

EquivalenceResult check_equivalence(const FiniteMdp& a, const FiniteMdp& b, const FiniteMdp* intermediate,
                                    const Relabeling* h, double gamma, double tol) {
    EquivalenceResult out;
    std::vector<std::string> reasons;
    auto note = [&](int c, const CheckResult& r) { reasons.push_back("case " + std::to_string(c) + ": " + r.witness); };

    if (h) {
        if (auto r = verify_relabeling(a, b, *h, tol)) return {true, 1, {}};
        else note(1, r);
    }
    if (auto r = check_policy_invariant_shaping(a, b, gamma, tol)) return {true, 2, {}};
    else note(2, r);
    if (h && intermediate) {
        auto r = verify_relabeling(a, *intermediate, *h, tol);
        if (r) r = check_policy_invariant_shaping(*intermediate, b, gamma, tol);
        if (r) return {true, 3, {}};
        note(3, r);

        r = check_policy_invariant_shaping(a, *intermediate, gamma, tol);
        if (r) r = verify_relabeling(*intermediate, b, *h, tol);
        if (r) return {true, 4, {}};
        note(4, r);
    }
    for (const auto& reason : reasons) out.witness += (out.witness.empty() ? "" : "; ") + reason;
    return out;
}

Policy transfer_policy(const FiniteMdp& source, const FiniteMdp& target, const Relabeling& h,
                       const Policy& policy_on_target) {
    if (policy_on_target.size() != target.num_pairs())
        throw DomainMismatchError("policy does not belong to the relabeling's target MDP");
    Eigen::VectorXd probs(source.num_pairs());
    for (Index p = 0; p < source.num_pairs(); ++p) {
        const auto& s = source.state_label(source.pair_state(p));
        const auto& a = source.action_label(source.pair_action(p));
        const std::string* fs = lookup(h.state_map, s);
        auto g = h.action_maps.find(s);
        const std::string* ga = g == h.action_maps.end() ? nullptr : lookup(g->second, a);
        if (!fs || !ga) throw DomainMismatchError("relabeling does not cover pair " + pair_label(source, p));
        auto ts = target.find_state(*fs);
        auto ta = target.find_action(*ga);
        auto q = (ts && ta) ? target.find_pair(*ts, *ta) : std::nullopt;
        if (!q) throw DomainMismatchError("pair " + pair_label(source, p) + " maps outside the target MDP");
        probs(p) = policy_on_target[*q];
    }
    return Policy(source, std::move(probs));
}

CheckResult validate_hidden_symmetry(const FiniteMdp& original, const HiddenSymmetry& hidden,
                                     const FiniteMdp* intermediate, double gamma, double tol) {
    const auto report = check_visible_symmetry(hidden.transformed, hidden.symmetry, tol);
    if (!report.valid)
        return CheckResult::fail(std::string("not a visible symmetry of the transformed MDP: ") +
                                 to_string(report.violations.front().condition) + ": " + report.violations.front().witness);
    const auto eq = check_equivalence(original, hidden.transformed, intermediate, &hidden.relabeling, gamma, tol);
    if (!eq.equivalent) return CheckResult::fail("original and transformed MDPs are not equivalent: " + eq.witness);
    return CheckResult::pass();
}

Policy hidden_pullback(const FiniteMdp& original, const HiddenSymmetry& hidden, const Quotient& quotient,
                       const Policy& quotient_policy) {
    const auto& target = hidden.transformed;
    const auto& sym = hidden.symmetry;
    if (static_cast<Index>(sym.pair_block.size()) != target.num_pairs() ||
        static_cast<Index>(sym.state_block.size()) != target.num_states())
        throw InvalidHiddenSymmetryError("symmetry does not fit the transformed MDP");
    if (quotient_policy.size() != quotient.mdp.num_pairs() ||
        static_cast<Index>(quotient.pair_of_block.size()) != sym.num_pair_blocks())
        throw BlockMismatchError("quotient policy is not keyed on this symmetry's pair blocks");

    Eigen::VectorXd probs(original.num_pairs());
    for (Index p = 0; p < original.num_pairs(); ++p) {
        const auto& s = original.state_label(original.pair_state(p));
        const auto& a = original.action_label(original.pair_action(p));
        const std::string* fs = lookup(hidden.relabeling.state_map, s);
        auto g = hidden.relabeling.action_maps.find(s);
        const std::string* ga = g == hidden.relabeling.action_maps.end() ? nullptr : lookup(g->second, a);
        if (!fs || !ga) throw InvalidHiddenSymmetryError("relabeling does not cover pair " + pair_label(original, p));
        auto ts = target.find_state(*fs);
        auto ta = target.find_action(*ga);
        auto q = (ts && ta) ? target.find_pair(*ts, *ta) : std::nullopt;
        if (!q) throw InvalidHiddenSymmetryError("pair " + pair_label(original, p) + " maps outside the transformed MDP");
        probs(p) = quotient_policy[quotient.pair_of_block[sym.pair_block[*q]]] /
                   static_cast<double>(n_psi(target, sym, *q));
    }
    return Policy(original, std::move(probs));
}

}  // namespace nvq
