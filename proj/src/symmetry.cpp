#include "nvq/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "nvq/errors.hpp"
#include "text.hpp"

namespace nvq {

using detail::num;
using detail::pair_label;

namespace {

std::vector<Index> normalize_blocks(const std::vector<Index>& raw) {
    std::unordered_map<Index, Index> renumber;
    std::vector<Index> out;
    out.reserve(raw.size());
    for (Index b : raw) {
        auto [it, _] = renumber.emplace(b, static_cast<Index>(renumber.size()));
        out.push_back(it->second);
    }
    return out;
}

Index count_blocks(const std::vector<Index>& blocks) {
    return blocks.empty() ? 0 : *std::max_element(blocks.begin(), blocks.end()) + 1;
}

// Members of each block, ascending.
std::vector<std::vector<Index>> members_of(const std::vector<Index>& blocks) {
    std::vector<std::vector<Index>> out(count_blocks(blocks));
    for (Index i = 0; i < static_cast<Index>(blocks.size()); ++i) out[blocks[i]].push_back(i);
    return out;
}

void require_fits(const FiniteMdp& mdp, const VisibleSymmetry& sym) {
    if (static_cast<Index>(sym.state_block.size()) != mdp.num_states() ||
        static_cast<Index>(sym.pair_block.size()) != mdp.num_pairs())
        throw ForeignElementError("symmetry block maps do not match the MDP's states and admissible pairs");
}

}  // namespace

Index VisibleSymmetry::num_state_blocks() const { return count_blocks(state_block); }
Index VisibleSymmetry::num_pair_blocks() const { return count_blocks(pair_block); }

VisibleSymmetry make_symmetry(const FiniteMdp& mdp, std::vector<Index> state_block, std::vector<Index> pair_block) {
    VisibleSymmetry sym{normalize_blocks(state_block), normalize_blocks(pair_block)};
    require_fits(mdp, sym);
    return sym;
}

VisibleSymmetry make_symmetry(const FiniteMdp& mdp, const std::map<std::string, Index>& state_block,
                              const std::map<StateAction, Index>& pair_block) {
    std::vector<Index> states(mdp.num_states(), -1);
    std::vector<Index> pairs(mdp.num_pairs(), -1);
    for (const auto& [label, block] : state_block) {
        auto s = mdp.find_state(label);
        if (!s) throw ForeignElementError("symmetry names unknown state '" + label + "'");
        states[*s] = block;
    }
    for (const auto& [key, block] : pair_block) {
        auto s = mdp.find_state(key.first);
        auto a = mdp.find_action(key.second);
        auto p = (s && a) ? mdp.find_pair(*s, *a) : std::nullopt;
        if (!p) throw ForeignElementError("symmetry names unknown pair (" + key.first + ", " + key.second + ")");
        pairs[*p] = block;
    }
    for (Index s = 0; s < mdp.num_states(); ++s)
        if (states[s] < 0) throw ForeignElementError("state '" + mdp.state_label(s) + "' is in no block");
    for (Index p = 0; p < mdp.num_pairs(); ++p)
        if (pairs[p] < 0) throw ForeignElementError("pair " + pair_label(mdp, p) + " is in no block");
    return make_symmetry(mdp, std::move(states), std::move(pairs));
}

VisibleSymmetry trivial_symmetry(const FiniteMdp& mdp) {
    VisibleSymmetry sym;
    for (Index s = 0; s < mdp.num_states(); ++s) sym.state_block.push_back(s);
    for (Index p = 0; p < mdp.num_pairs(); ++p) sym.pair_block.push_back(p);
    return sym;
}

std::vector<BlockOutcome> block_distribution(const FiniteMdp& mdp, const std::vector<Index>& state_block, Index pair,
                                             double tol) {
    std::map<Index, std::vector<std::pair<double, double>>> by_block;
    for (const auto& t : mdp.outcomes(pair)) by_block[state_block[t.next]].emplace_back(t.reward, t.prob);
    std::vector<BlockOutcome> out;
    for (auto& [block, rp] : by_block)
        for (const auto& [r, p] : aggregate_rewards(std::move(rp), tol)) out.push_back({block, r, p});
    return out;
}

std::optional<std::string> compare_block_distributions(const std::vector<BlockOutcome>& a,
                                                       const std::vector<BlockOutcome>& b, double tol) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.size() || i >= b.size()) {
            const auto& extra = i < a.size() ? a[i] : b[i];
            return "block " + std::to_string(extra.block) + " reward " + num(extra.reward) +
                   " has probability " + num(extra.prob) + " on one side only";
        }
        const auto& x = a[i];
        const auto& y = b[i];
        if (x.block != y.block || std::abs(x.reward - y.reward) > tol)
            return "outcome (block " + std::to_string(x.block) + ", reward " + num(x.reward) + ") vs (block " +
                   std::to_string(y.block) + ", reward " + num(y.reward) + ")";
        if (std::abs(x.prob - y.prob) > tol)
            return "block " + std::to_string(x.block) + " reward " + num(x.reward) + ": probability " +
                   num(x.prob) + " vs " + num(y.prob);
    }
    return std::nullopt;
}

VisibleSymmetry coarsest_symmetry(const FiniteMdp& mdp, std::vector<Index> state_block, double tol) {
    if (static_cast<Index>(state_block.size()) != mdp.num_states())
        throw ForeignElementError("state block map does not match the MDP");
    state_block = normalize_blocks(state_block);

    std::vector<Index> pair_block(mdp.num_pairs(), -1);
    // Per state block: (representative pair, its distribution) of each class so far.
    std::vector<std::vector<std::pair<Index, std::vector<BlockOutcome>>>> classes(count_blocks(state_block));
    Index next_id = 0;
    std::vector<std::vector<Index>> ids(classes.size());
    for (Index p = 0; p < mdp.num_pairs(); ++p) {
        const Index sb = state_block[mdp.pair_state(p)];
        auto dist = block_distribution(mdp, state_block, p, tol);
        auto& cls = classes[sb];
        std::size_t k = 0;
        for (; k < cls.size(); ++k)
            if (!compare_block_distributions(cls[k].second, dist, tol)) break;
        if (k == cls.size()) {
            cls.emplace_back(p, std::move(dist));
            ids[sb].push_back(next_id++);
        }
        pair_block[p] = ids[sb][k];
    }
    return make_symmetry(mdp, std::move(state_block), std::move(pair_block));
}

const char* to_string(SymmetryCondition c) {
    switch (c) {
        case SymmetryCondition::Coverage: return "coverage";
        case SymmetryCondition::StateConsistency: return "state-consistency";
        case SymmetryCondition::BlockDynamics: return "block-dynamics";
    }
    return "unknown";
}

SymmetryReport check_visible_symmetry(const FiniteMdp& mdp, const VisibleSymmetry& sym, double tol) {
    require_fits(mdp, sym);
    for (Index b : sym.state_block)
        if (b < 0) throw ForeignElementError("negative state block id");
    for (Index b : sym.pair_block)
        if (b < 0) throw ForeignElementError("negative pair block id");

    SymmetryReport report;
    auto record = [&](SymmetryCondition c, std::string witness) {
        for (const auto& v : report.violations)
            if (v.condition == c) return;
        report.violations.push_back({c, std::move(witness)});
    };

    const auto pair_members = members_of(sym.pair_block);
    const auto state_members = members_of(sym.state_block);

    // (ii) consistency and block dynamics, against each block's first member.
    for (const auto& members : pair_members) {
        if (members.empty()) continue;
        const Index rep = members.front();
        const auto rep_dist = block_distribution(mdp, sym.state_block, rep, tol);
        for (std::size_t i = 1; i < members.size(); ++i) {
            const Index p = members[i];
            if (sym.state_block[mdp.pair_state(p)] != sym.state_block[mdp.pair_state(rep)]) {
                record(SymmetryCondition::StateConsistency,
                       pair_label(mdp, rep) + " ~ " + pair_label(mdp, p) + " but their states are in different blocks");
                continue;
            }
            if (auto diff = compare_block_distributions(rep_dist, block_distribution(mdp, sym.state_block, p, tol), tol))
                record(SymmetryCondition::BlockDynamics, pair_label(mdp, rep) + " vs " + pair_label(mdp, p) + ": " + *diff);
        }
    }

    // (i) every state in a block offers every pair block present at any other member.
    for (const auto& members : state_members) {
        std::vector<std::set<Index>> offered;
        for (Index s : members) {
            std::set<Index> blocks;
            for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p) blocks.insert(sym.pair_block[p]);
            offered.push_back(std::move(blocks));
        }
        auto find_gap = [&]() -> std::optional<std::string> {
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = 0; j < members.size(); ++j) {
                    if (i == j) continue;
                    for (Index p = mdp.pair_begin(members[i]); p < mdp.pair_end(members[i]); ++p)
                        if (!offered[j].contains(sym.pair_block[p]))
                            return pair_label(mdp, p) + " has no equivalent action at state '" +
                                   mdp.state_label(members[j]) + "'";
                }
            return std::nullopt;
        };
        if (auto gap = find_gap()) record(SymmetryCondition::Coverage, std::move(*gap));
    }

    report.valid = report.violations.empty();
    return report;
}

bool is_simple(const VisibleSymmetry& sym, const FiniteMdp& mdp) {
    require_fits(mdp, sym);
    std::vector<Index> action_of_block(sym.num_pair_blocks(), -1);
    for (Index p = 0; p < mdp.num_pairs(); ++p) {
        Index& a = action_of_block[sym.pair_block[p]];
        if (a < 0)
            a = mdp.pair_action(p);
        else if (a != mdp.pair_action(p))
            return false;
    }
    return true;
}

Index n_psi(const FiniteMdp& mdp, const VisibleSymmetry& sym, Index pair) {
    require_fits(mdp, sym);
    if (pair < 0 || pair >= mdp.num_pairs()) throw InadmissiblePairError("pair index out of range");
    const Index s = mdp.pair_state(pair);
    Index n = 0;
    for (Index p = mdp.pair_begin(s); p < mdp.pair_end(s); ++p)
        if (sym.pair_block[p] == sym.pair_block[pair]) ++n;
    return n;
}

Index n_psi(const FiniteMdp& mdp, const VisibleSymmetry& sym, std::string_view s, std::string_view a) {
    return n_psi(mdp, sym, mdp.pair_index(s, a));
}

Quotient build_quotient(const FiniteMdp& mdp, const VisibleSymmetry& sym, double tol) {
    const auto report = check_visible_symmetry(mdp, sym, tol);
    if (!report.valid)
        throw InvalidSymmetryError(std::string("not a visible symmetry: ") + to_string(report.violations.front().condition) +
                                   ": " + report.violations.front().witness);

    const bool simple = is_simple(sym, mdp);
    const auto pair_members = members_of(sym.pair_block);
    const auto state_members = members_of(sym.state_block);

    Quotient q;
    std::vector<std::string> states;
    for (const auto& members : state_members) {
        q.state_representative.push_back(members.front());
        states.push_back("[" + mdp.state_label(members.front()) + "]");
    }

    std::vector<std::string> block_action(pair_members.size());
    std::vector<std::string> actions;
    if (simple) {
        std::vector<bool> used(mdp.num_actions(), false);
        for (const auto& members : pair_members) used[mdp.pair_action(members.front())] = true;
        for (Index a = 0; a < mdp.num_actions(); ++a)
            if (used[a]) actions.push_back(mdp.action_label(a));
        for (std::size_t b = 0; b < pair_members.size(); ++b)
            block_action[b] = mdp.action_label(mdp.pair_action(pair_members[b].front()));
    } else {
        for (std::size_t b = 0; b < pair_members.size(); ++b) {
            block_action[b] = "(" + std::to_string(b) + ")";
            actions.push_back(block_action[b]);
        }
    }

    std::vector<StateAction> admissible;
    std::map<StateAction, std::vector<Outcome>> dynamics;
    for (std::size_t b = 0; b < pair_members.size(); ++b) {
        const auto& members = pair_members[b];
        const Index rep = members.front();
        q.representative.push_back(rep);
        const auto rep_dist = block_distribution(mdp, sym.state_block, rep, tol);
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (auto diff = compare_block_distributions(rep_dist, block_distribution(mdp, sym.state_block, members[i], tol), tol))
                throw RepresentativeMismatchError("pair block " + std::to_string(b) + ": " + pair_label(mdp, rep) +
                                                  " vs " + pair_label(mdp, members[i]) + ": " + *diff);
        }
        StateAction key{states[sym.state_block[mdp.pair_state(rep)]], block_action[b]};
        admissible.push_back(key);
        auto& row = dynamics[key];
        for (const auto& o : rep_dist) row.push_back({states[o.block], o.reward, o.prob});
    }

    q.mdp = make_mdp(std::move(states), std::move(actions), admissible, dynamics, tol);
    for (const auto& key : admissible) q.pair_of_block.push_back(q.mdp.pair_index(key.first, key.second));
    return q;
}

Policy pullback_policy(const FiniteMdp& mdp, const VisibleSymmetry& sym, const Quotient& quotient,
                       const Policy& quotient_policy) {
    require_fits(mdp, sym);
    if (quotient_policy.size() != quotient.mdp.num_pairs() ||
        static_cast<Index>(quotient.pair_of_block.size()) != sym.num_pair_blocks())
        throw BlockMismatchError("quotient policy is not keyed on this symmetry's pair blocks");
    Eigen::VectorXd probs(mdp.num_pairs());
    for (Index p = 0; p < mdp.num_pairs(); ++p)
        probs(p) = quotient_policy[quotient.pair_of_block[sym.pair_block[p]]] / static_cast<double>(n_psi(mdp, sym, p));
    return Policy(mdp, std::move(probs));
}

}  // namespace nvq
