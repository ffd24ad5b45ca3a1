#include "nvq/newsvendor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "nvq/errors.hpp"
#include "text.hpp"

namespace nvq {

using detail::num;

namespace {

bool in_support(const NewsvendorSpec& spec, std::int64_t d) {
    return std::binary_search(spec.deviation_support.begin(), spec.deviation_support.end(), d);
}

std::int64_t parse_order(const std::string& label) {
    std::size_t used = 0;
    const long long v = std::stoll(label, &used);
    if (used != label.size()) throw Error("action label '" + label + "' is not an order quantity");
    return v;
}

// Order-quantity action labels of the days up to `horizon`, ascending numerically.
std::vector<std::string> order_actions(const NewsvendorSpec& spec, std::int64_t horizon) {
    std::set<std::int64_t> values;
    for (std::int64_t t = 0; t < horizon; ++t)
        for (std::int64_t d : spec.deviation_support) values.insert(spec.forecasts[t] + d);
    std::vector<std::string> out;
    for (auto v : values) out.push_back(order_action(v));
    return out;
}

// Shared builder for M and M': `reward_of(t, a, d)` supplies the per-deviation reward.
template <typename RewardOf>
FiniteMdp build_day_chain(const NewsvendorSpec& spec, std::int64_t horizon, RewardOf reward_of, double tol) {
    std::vector<std::string> states;
    for (std::int64_t t = 0; t < horizon; ++t) states.push_back(day_state(t));

    std::vector<StateAction> admissible;
    std::map<StateAction, std::vector<Outcome>> dynamics;
    for (std::int64_t t = 0; t < horizon; ++t) {
        const auto& probs = spec.distribution(t);
        const std::string next = day_state(successor_day(t, horizon, spec.cycle_length));
        for (std::int64_t d_action : spec.deviation_support) {
            const std::int64_t a = spec.forecasts[t] + d_action;
            std::vector<std::pair<double, double>> rp;
            for (std::size_t i = 0; i < spec.deviation_support.size(); ++i)
                rp.emplace_back(reward_of(t, a, spec.deviation_support[i]), probs[i]);
            StateAction key{states[t], order_action(a)};
            admissible.push_back(key);
            auto& row = dynamics[key];
            for (const auto& [r, p] : aggregate_rewards(std::move(rp), tol)) row.push_back({next, r, p});
        }
    }
    return make_mdp(std::move(states), order_actions(spec, horizon), admissible, dynamics, tol);
}

void require_horizon(const NewsvendorSpec& spec, std::int64_t horizon) {
    if (horizon < 1 || horizon > static_cast<std::int64_t>(spec.forecasts.size()))
        throw HorizonError("horizon must lie in [1, " + std::to_string(spec.forecasts.size()) + "], got " +
                           std::to_string(horizon));
}

std::int64_t day_of(const FiniteMdp& mdp, Index s) {
    const auto& label = mdp.state_label(s);
    if (label.rfind("s_", 0) != 0) throw Error("state '" + label + "' is not a newsvendor day");
    return std::stoll(label.substr(2));
}

}  // namespace

const std::vector<double>& NewsvendorSpec::distribution(std::int64_t t) const {
    return deviation_probs.size() == 1 ? deviation_probs.front() : deviation_probs[t % cycle_length];
}

std::int64_t NewsvendorSpec::demand_bound() const {
    return *std::max_element(forecasts.begin(), forecasts.end()) + deviation_support.back() + 1;
}

std::int64_t NewsvendorSpec::distinct_forecasts(std::int64_t horizon) const {
    horizon = std::min<std::int64_t>(horizon, static_cast<std::int64_t>(forecasts.size()));
    return static_cast<std::int64_t>(std::set<std::int64_t>(forecasts.begin(), forecasts.begin() + horizon).size());
}

void validate(const NewsvendorSpec& spec, double tol) {
    if (spec.forecasts.empty()) throw SpecError("forecasts must not be empty");
    if (spec.deviation_support.empty()) throw SpecError("deviation_support must not be empty");
    for (std::size_t i = 1; i < spec.deviation_support.size(); ++i)
        if (spec.deviation_support[i] <= spec.deviation_support[i - 1])
            throw SpecError("deviation_support must be strictly increasing");
    if (spec.cycle_length < 1) throw SpecError("cycle_length must be at least 1");
    if (!(spec.purchase_cost > 0.0)) throw SpecError("purchase cost must be positive");
    if (!(spec.selling_price > 0.0)) throw SpecError("selling price must be positive");
    if (!(spec.purchase_cost < spec.selling_price))
        throw SpecError("purchase cost must be less than selling price");

    const auto rows = static_cast<std::int64_t>(spec.deviation_probs.size());
    if (rows != 1 && rows != spec.cycle_length)
        throw SpecError("deviation_probs must hold 1 or cycle_length (" + std::to_string(spec.cycle_length) +
                        ") distributions, got " + std::to_string(rows));
    for (std::int64_t k = 0; k < rows; ++k) {
        const auto& row = spec.deviation_probs[k];
        if (row.size() != spec.deviation_support.size())
            throw SpecError("distribution " + std::to_string(k) + " has " + std::to_string(row.size()) +
                            " entries for a support of " + std::to_string(spec.deviation_support.size()));
        double total = 0.0;
        for (double p : row) {
            if (!(p >= 0.0 && p <= 1.0)) throw SpecError("deviation probabilities must lie in [0,1]");
            total += p;
        }
        if (std::abs(total - 1.0) > tol)
            throw SpecError("distribution " + std::to_string(k) + " sums to " + num(total) + ", not 1");
    }
    for (std::size_t t = 0; t < spec.forecasts.size(); ++t) {
        if (spec.forecasts[t] < 0) throw SpecError("forecast F_" + std::to_string(t) + " is negative");
        if (spec.forecasts[t] + spec.deviation_support.front() < 0)
            throw SpecError("demand F_" + std::to_string(t) + " + " + std::to_string(spec.deviation_support.front()) +
                            " is negative");
    }
}

double reward(const NewsvendorSpec& spec, std::int64_t t, std::int64_t a, std::int64_t d) {
    if (t < 0 || t >= static_cast<std::int64_t>(spec.forecasts.size()))
        throw HorizonError("day " + std::to_string(t) + " is outside the forecast horizon");
    const std::int64_t f = spec.forecasts[t];
    if (!in_support(spec, a - f))
        throw OutOfRangeActionError("order " + std::to_string(a) + " is not in F_" + std::to_string(t) + " + Z_delta");
    if (!in_support(spec, d)) throw OutOfSupportDeviationError("deviation " + std::to_string(d) + " is not in Z_delta");
    return static_cast<double>(std::min(f + d, a)) * spec.selling_price - static_cast<double>(a) * spec.purchase_cost;
}

namespace {

// Profit of ordering exactly F_t. Defined even when 0 is outside Z_delta.
double forecast_profit(const NewsvendorSpec& spec, std::int64_t t, std::int64_t d) {
    const std::int64_t f = spec.forecasts[t];
    return static_cast<double>(std::min(f + d, f)) * spec.selling_price - static_cast<double>(f) * spec.purchase_cost;
}

}  // namespace

double shaped_reward(const NewsvendorSpec& spec, std::int64_t a_prime, std::int64_t d) {
    if (!in_support(spec, a_prime)) throw OutOfSupportError("offset " + std::to_string(a_prime) + " is not in Z_delta");
    if (!in_support(spec, d)) throw OutOfSupportDeviationError("deviation " + std::to_string(d) + " is not in Z_delta");
    return static_cast<double>(std::min(d, a_prime) - std::min<std::int64_t>(d, 0)) * spec.selling_price -
           static_cast<double>(a_prime) * spec.purchase_cost;
}

std::string day_state(std::int64_t t) { return "s_" + std::to_string(t); }
std::string order_action(std::int64_t a) { return std::to_string(a); }

std::int64_t successor_day(std::int64_t t, std::int64_t horizon, std::int64_t cycle_length) {
    if (t + 1 < horizon) return t + 1;
    return horizon >= cycle_length ? horizon - cycle_length : t;
}

FiniteMdp build_original(const NewsvendorSpec& spec, std::int64_t horizon, double tol) {
    require_horizon(spec, horizon);
    return build_day_chain(
        spec, horizon, [&](std::int64_t t, std::int64_t a, std::int64_t d) { return reward(spec, t, a, d); }, tol);
}

Policy deterministic_optimal(const NewsvendorSpec& spec, const FiniteMdp& original) {
    std::vector<Index> actions;
    for (Index s = 0; s < original.num_states(); ++s)
        actions.push_back(original.action_index(order_action(spec.forecasts[day_of(original, s)])));
    return Policy::deterministic(original, actions);
}

FiniteMdp shape(const NewsvendorSpec& spec, const FiniteMdp& original, double tol) {
    const std::int64_t horizon = original.num_states();
    require_horizon(spec, horizon);
    auto shaped = build_day_chain(
        spec, horizon,
        [&](std::int64_t t, std::int64_t a, std::int64_t d) {
            return reward(spec, t, a, d) - forecast_profit(spec, t, d);
        },
        tol);
    if (auto same = same_transition_structure(original, shaped, tol); !same)
        throw StructureMismatchError("shaped MDP changes the transition structure: " + same.witness);
    return shaped;
}

Relabeled relabel(const NewsvendorSpec& spec, const FiniteMdp& shaped, double tol) {
    Relabeling h;
    for (Index s = 0; s < shaped.num_states(); ++s) {
        const auto& label = shaped.state_label(s);
        const std::int64_t f = spec.forecasts[day_of(shaped, s)];
        h.state_map[label] = label;
        auto& g = h.action_maps[label];
        for (Index p = shaped.pair_begin(s); p < shaped.pair_end(s); ++p) {
            const auto& a = shaped.action_label(shaped.pair_action(p));
            g[a] = order_action(parse_order(a) - f);
        }
    }
    auto mdp = apply_relabeling(shaped, h, tol);
    return {std::move(mdp), std::move(h)};
}

VisibleSymmetry construct_symmetry(const NewsvendorSpec& spec, const FiniteMdp& relabeled, double tol) {
    const auto width = static_cast<Index>(spec.deviation_support.size());
    std::vector<Index> state_block(relabeled.num_states());
    std::vector<Index> pair_block(relabeled.num_pairs());
    for (Index s = 0; s < relabeled.num_states(); ++s) {
        const Index residue = day_of(relabeled, s) % spec.cycle_length;
        state_block[s] = residue;
        for (Index p = relabeled.pair_begin(s); p < relabeled.pair_end(s); ++p) {
            const std::int64_t offset = parse_order(relabeled.action_label(relabeled.pair_action(p)));
            const auto it = std::lower_bound(spec.deviation_support.begin(), spec.deviation_support.end(), offset);
            if (it == spec.deviation_support.end() || *it != offset)
                throw SymmetryConstructionError("relabeled action " + std::to_string(offset) + " is not in Z_delta");
            pair_block[p] = residue * width + (it - spec.deviation_support.begin());
        }
    }
    auto sym = make_symmetry(relabeled, std::move(state_block), std::move(pair_block));
    const auto report = check_visible_symmetry(relabeled, sym, tol);
    if (!report.valid)
        throw SymmetryConstructionError(std::string("cyclic symmetry rejected: ") +
                                        to_string(report.violations.front().condition) + ": " +
                                        report.violations.front().witness);
    if (!is_simple(sym, relabeled)) throw SymmetryConstructionError("cyclic symmetry is not simple");
    return sym;
}

ReductionResult reduce(const NewsvendorSpec& spec, std::int64_t horizon, double tol) {
    validate(spec, tol);
    ReductionResult r;
    r.spec = spec;
    r.horizon = horizon;
    r.original = build_original(spec, horizon, tol);
    r.shaped = shape(spec, r.original, tol);
    if (auto ok = check_policy_invariant_shaping(r.original, r.shaped, 0.0, tol); !ok)
        throw StructureMismatchError("reward shaping changed the optimal policies: " + ok.witness);

    auto [relabeled, h] = relabel(spec, r.shaped, tol);
    if (auto ok = verify_relabeling(r.shaped, relabeled, h, tol); !ok)
        throw NotBijectiveError("relabeling check failed: " + ok.witness);
    r.relabeled = std::move(relabeled);
    r.relabeling = std::move(h);

    r.hidden_symmetry = {r.relabeled, construct_symmetry(spec, r.relabeled, tol), r.relabeling,
                         {Transform::Shape, Transform::Relabel}};
    if (auto ok = validate_hidden_symmetry(r.original, r.hidden_symmetry, &r.shaped, 0.0, tol); !ok)
        throw InvalidHiddenSymmetryError(ok.witness);
    r.quotient = build_quotient(r.relabeled, r.hidden_symmetry.symmetry, tol);

    // Lambda, straight from the offset formula; the generic route is hidden_pullback.
    std::vector<Index> quotient_pair(r.original.num_pairs());
    for (Index p = 0; p < r.original.num_pairs(); ++p) {
        const std::int64_t t = day_of(r.original, r.original.pair_state(p));
        const std::int64_t a = parse_order(r.original.action_label(r.original.pair_action(p)));
        const std::string block = "[" + day_state(t % spec.cycle_length) + "]";
        quotient_pair[p] = r.quotient.mdp.pair_index(block, order_action(a - spec.forecasts[t]));
    }
    r.pullback = [original = r.original, quotient_pair = std::move(quotient_pair),
                  quotient_pairs = r.quotient.mdp.num_pairs()](const Policy& pi) {
        if (pi.size() != quotient_pairs) throw BlockMismatchError("policy does not belong to the quotient MDP");
        Eigen::VectorXd probs(original.num_pairs());
        for (Index p = 0; p < original.num_pairs(); ++p) probs(p) = pi[quotient_pair[p]];
        return Policy(original, std::move(probs));
    };
    return r;
}

std::vector<std::int64_t> quotient_offsets(const ReductionResult& r, const Policy& quotient_policy) {
    const auto& q = r.quotient.mdp;
    require_policy_for(q, quotient_policy);
    std::vector<std::int64_t> out;
    for (Index s = 0; s < q.num_states(); ++s) {
        auto a = quotient_policy.deterministic_action(q, s);
        if (!a) throw InvalidPolicyError("quotient policy is not deterministic at '" + q.state_label(s) + "'");
        out.push_back(parse_order(q.action_label(*a)));
    }
    return out;
}

std::vector<std::int64_t> pulled_back_orders(const ReductionResult& r, const std::vector<std::int64_t>& offsets) {
    std::vector<std::int64_t> orders;
    for (std::int64_t t = 0; t < r.horizon; ++t)
        orders.push_back(r.spec.forecasts[t] + offsets.at(t % r.spec.cycle_length));
    return orders;
}

std::vector<std::int64_t> orders_of(const FiniteMdp& original, const Policy& policy) {
    require_policy_for(original, policy);
    std::vector<std::int64_t> out;
    for (Index s = 0; s < original.num_states(); ++s) {
        auto a = policy.deterministic_action(original, s);
        if (!a) throw InvalidPolicyError("policy is not deterministic at '" + original.state_label(s) + "'");
        out.push_back(parse_order(original.action_label(*a)));
    }
    return out;
}

RewardFunction profit_reward(const NewsvendorSpec& spec) {
    return [spec](std::int64_t t, std::int64_t a, std::int64_t d) { return reward(spec, t, a, d); };
}

RewardConditionResult check_reward_condition(const NewsvendorSpec& spec, const RewardFunction& rew,
                                             std::int64_t horizon, double tol) {
    require_horizon(spec, horizon);
    const auto& support = spec.deviation_support;
    const auto& f = spec.forecasts;

    auto argmax_violation = [&](std::int64_t x) -> std::optional<std::string> {
        for (std::int64_t t = 0; t < horizon; ++t) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::int64_t d : support) best = std::max(best, rew(t, f[t] + d, 0));
            const double at_x = rew(t, f[t] + x, 0);
            if (at_x < best - tol)
                return "x=" + std::to_string(x) + ": order " + std::to_string(f[t] + x) + " does not maximize Rew_" +
                       std::to_string(t) + "(., 0) (" + num(at_x) + " < " + num(best) + ")";
        }
        return std::nullopt;
    };
    auto identity_violation = [&](std::int64_t x) -> std::optional<std::string> {
        for (std::int64_t t = 0; t < horizon; ++t)
            for (std::int64_t l = 0; l < horizon; ++l)
                for (std::int64_t off : support)
                    for (std::int64_t d : support) {
                        const std::int64_t a = f[t] + off;
                        const double lhs = rew(t, a, d) - rew(t, x + f[t], d);
                        const double rhs = rew(l, a - f[t] + f[l], d) - rew(l, x + f[l], d);
                        if (std::abs(lhs - rhs) > tol)
                            return "x=" + std::to_string(x) + ": t=" + std::to_string(t) + ", l=" + std::to_string(l) +
                                   ", a=" + std::to_string(a) + ", d=" + std::to_string(d) + ": " + num(lhs) +
                                   " != " + num(rhs);
                    }
        return std::nullopt;
    };

    // Prefer reporting a candidate that passed the argmax test: it explains the failure best.
    std::string argmax_failure;
    std::string identity_failure;
    for (std::int64_t x : support) {
        if (auto v = argmax_violation(x)) {
            if (argmax_failure.empty()) argmax_failure = *v;
            continue;
        }
        if (auto v = identity_violation(x)) {
            if (identity_failure.empty()) identity_failure = *v;
            continue;
        }
        return {true, x, {}};
    }
    return {false, std::nullopt, identity_failure.empty() ? argmax_failure : identity_failure};
}

}  // namespace nvq
