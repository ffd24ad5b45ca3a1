#include "nvq/report.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace nvq::report {

namespace {

std::int64_t day_of(const std::string& state) { return std::stoll(state.substr(2)); }

std::string plural(Index n, const char* word) { return fmt::format("{} {}{}", n, word, n == 1 ? "" : "s"); }

}  // namespace

std::string g12(double x) { return fmt::format("{:.12g}", x == 0.0 ? 0.0 : x); }

void write_quotient(std::ostream& out, const Quotient& quotient) {
    const auto& q = quotient.mdp;
    out << "# state action reward probability next_state\n";
    for (Index p = 0; p < q.num_pairs(); ++p)
        for (const auto& o : q.outcomes(p))
            out << fmt::format("{} {} {} {} {}\n", q.state_label(q.pair_state(p)), q.action_label(q.pair_action(p)),
                               g12(o.reward), g12(o.prob), q.state_label(o.next));
}

void write_symmetry(std::ostream& out, const FiniteMdp& mdp, const VisibleSymmetry& symmetry) {
    out << "# kind state action block\n";
    for (Index s = 0; s < mdp.num_states(); ++s)
        out << fmt::format("state {} - {}\n", mdp.state_label(s), symmetry.state_block[s]);
    for (Index p = 0; p < mdp.num_pairs(); ++p)
        out << fmt::format("pair {} {} {}\n", mdp.state_label(mdp.pair_state(p)), mdp.action_label(mdp.pair_action(p)),
                           symmetry.pair_block[p]);
}

void write_relabeling(std::ostream& out, const FiniteMdp& source, const Relabeling& h) {
    out << "# state action relabeled_state relabeled_action\n";
    for (Index p = 0; p < source.num_pairs(); ++p) {
        const auto& s = source.state_label(source.pair_state(p));
        const auto& a = source.action_label(source.pair_action(p));
        out << fmt::format("{} {} {} {}\n", s, a, h.state_map.at(s), h.action_maps.at(s).at(a));
    }
}

void write_pullback(std::ostream& out, const ReductionResult& r) {
    out << "# state order quotient_state offset\n";
    const auto& m = r.original;
    for (Index p = 0; p < m.num_pairs(); ++p) {
        const auto& s = m.state_label(m.pair_state(p));
        const std::int64_t t = day_of(s);
        const std::int64_t a = std::stoll(m.action_label(m.pair_action(p)));
        out << fmt::format("{} {} [{}] {}\n", s, a, day_state(t % r.spec.cycle_length), a - r.spec.forecasts[t]);
    }
}

void write_reward_table(std::ostream& out, const NewsvendorSpec& spec, const FiniteMdp& mdp,
                        const DayReward& reward_of) {
    out << fmt::format("{:<8}{:>8}", "state", "action");
    for (std::int64_t d : spec.deviation_support) out << fmt::format("{:>16}", fmt::format("d={}", d));
    out << fmt::format("{:>16}\n", "mean");
    const Eigen::VectorXd mean = expected_rewards(mdp);
    for (Index p = 0; p < mdp.num_pairs(); ++p) {
        const auto& s = mdp.state_label(mdp.pair_state(p));
        const auto& a = mdp.action_label(mdp.pair_action(p));
        out << fmt::format("{:<8}{:>8}", s, a);
        for (std::int64_t d : spec.deviation_support)
            out << fmt::format("{:>16}", g12(reward_of(day_of(s), std::stoll(a), d)));
        out << fmt::format("{:>16}\n", g12(mean(p)));
    }
}

void write_quotient_table(std::ostream& out, const Quotient& quotient) {
    const auto& q = quotient.mdp;
    const Eigen::VectorXd mean = expected_rewards(q);
    out << fmt::format("{:<8}{:>8}{:>16}  {}\n", "state", "action", "mean", "outcomes (next, reward, probability)");
    for (Index p = 0; p < q.num_pairs(); ++p) {
        out << fmt::format("{:<8}{:>8}{:>16} ", q.state_label(q.pair_state(p)), q.action_label(q.pair_action(p)),
                           g12(mean(p)));
        for (const auto& o : q.outcomes(p))
            out << fmt::format(" ({}, {}, {})", q.state_label(o.next), g12(o.reward), g12(o.prob));
        out << '\n';
    }
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
    const auto cell = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string("NA"); };
    out << "seed,steps_original,steps_quotient,distinct_forecasts\n";
    for (const auto& rec : report.records)
        out << fmt::format("{},{},{},{}\n", rec.seed, cell(rec.steps_original), cell(rec.steps_quotient),
                           report.distinct_forecasts);
    out << fmt::format("# summary: median_original={} median_quotient={} ratio={} steps={} rng={}\n",
                       g12(report.median_original), g12(report.median_quotient), g12(report.ratio),
                       report.horizon_steps, report.rng);
}

void write_walkthrough(std::ostream& out, const ReductionResult& r) {
    const auto& spec = r.spec;
    out << fmt::format("forecasts: {}\n", fmt::join(spec.forecasts.begin(), spec.forecasts.begin() + r.horizon, " "));
    out << fmt::format("deviations: {}\n", fmt::join(spec.deviation_support, " "));
    for (std::size_t k = 0; k < spec.deviation_probs.size(); ++k) {
        std::vector<std::string> probs;
        for (double p : spec.deviation_probs[k]) probs.push_back(g12(p));
        out << fmt::format("probabilities{}: {}\n", spec.deviation_probs.size() == 1 ? "" : fmt::format(" {}", k),
                           fmt::join(probs, " "));
    }
    out << fmt::format("purchase cost: {}\nselling price: {}\n", g12(spec.purchase_cost), g12(spec.selling_price));

    out << "\n== original: profit per order and deviation ==\n";
    write_reward_table(out, spec, r.original,
                       [&](std::int64_t t, std::int64_t a, std::int64_t d) { return reward(spec, t, a, d); });

    out << "\n== shaped: profit minus profit of ordering the forecast ==\n";
    write_reward_table(out, spec, r.shaped, [&](std::int64_t t, std::int64_t a, std::int64_t d) {
        return shaped_reward(spec, a - spec.forecasts[t], d);
    });

    out << "\n== relabeled: action = order - forecast ==\n";
    write_reward_table(out, spec, r.relabeled,
                       [&](std::int64_t, std::int64_t a, std::int64_t d) { return shaped_reward(spec, a, d); });

    out << fmt::format("\n== quotient: {}, {} ==\n", plural(r.quotient.mdp.num_states(), "state"),
                       plural(r.quotient.mdp.num_actions(), "action"));
    write_quotient_table(out, r.quotient);
}

}  // namespace nvq::report
