#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include "nvq/newsvendor.hpp"
#include "nvq/solver.hpp"

namespace nvq::report {

/// %.12g, with -0 printed as 0.
std::string g12(double x);

/// One row per outcome: "state action reward probability next_state".
void write_quotient(std::ostream& out, const Quotient& quotient);

/// One row per state ("state <s> - <block>") and per pair ("pair <s> <a> <block>").
void write_symmetry(std::ostream& out, const FiniteMdp& mdp, const VisibleSymmetry& symmetry);

/// One row per pair of `source`: "state action relabeled_state relabeled_action".
void write_relabeling(std::ostream& out, const FiniteMdp& source, const Relabeling& h);

/// One row per pair of the original MDP: "state order quotient_state offset".
void write_pullback(std::ostream& out, const ReductionResult& r);

/// Per-deviation reward rows of a newsvendor-shaped MDP. `reward_of(t, a, d)`
/// receives the action label as an integer; the mean column is R(s,a).
using DayReward = std::function<double(std::int64_t t, std::int64_t a, std::int64_t d)>;
void write_reward_table(std::ostream& out, const NewsvendorSpec& spec, const FiniteMdp& mdp,
                        const DayReward& reward_of);

/// Outcome distribution and expected reward of every quotient pair.
void write_quotient_table(std::ostream& out, const Quotient& quotient);

/// Header, one row per seed (NA when not identified), then a "# summary" line.
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

/// All four stages of a reduction as text tables.
void write_walkthrough(std::ostream& out, const ReductionResult& r);

}  // namespace nvq::report
