#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvq/mdp.hpp"
#include "nvq/policy.hpp"

namespace nvq {

/**
 * Visible symmetry (~_S, ~_Psi) as two block-index maps.
 *
 * state_block[s] and pair_block[p] hold block ids normalized to 0..k-1 in
 * order of first appearance, so block 0 always contains state 0 (pair 0).
 */
struct VisibleSymmetry {
    std::vector<Index> state_block;
    std::vector<Index> pair_block;

    Index num_state_blocks() const;
    Index num_pair_blocks() const;
};

/// Normalizes block ids. Throws ForeignElementError when the maps do not fit the MDP.
VisibleSymmetry make_symmetry(const FiniteMdp& mdp, std::vector<Index> state_block, std::vector<Index> pair_block);

/// Label-keyed variant; every state and every admissible pair must be assigned.
VisibleSymmetry make_symmetry(const FiniteMdp& mdp, const std::map<std::string, Index>& state_block,
                              const std::map<StateAction, Index>& pair_block);

/// Every state and pair in its own block.
VisibleSymmetry trivial_symmetry(const FiniteMdp& mdp);

/// Coarsest pair partition compatible with `state_block`: pairs share a block
/// iff their states share a block and their block-level dynamics agree. If any
/// visible symmetry with this state partition exists, this one is valid too.
VisibleSymmetry coarsest_symmetry(const FiniteMdp& mdp, std::vector<Index> state_block, double tol = kTolerance);

enum class SymmetryCondition {
    Coverage,          // (i) s1 ~ s2 needs a matching action at s2
    StateConsistency,  // (ii) equivalent pairs live in equivalent states
    BlockDynamics,     // (ii) p(X, r | s1, a1) = p(X, r | s2, a2)
};

const char* to_string(SymmetryCondition c);

struct SymmetryViolation {
    SymmetryCondition condition;
    std::string witness;
};

struct SymmetryReport {
    bool valid = true;
    std::vector<SymmetryViolation> violations;  // at most one per condition
};

SymmetryReport check_visible_symmetry(const FiniteMdp& mdp, const VisibleSymmetry& sym, double tol = kTolerance);

/// True iff every pair block shares one action.
bool is_simple(const VisibleSymmetry& sym, const FiniteMdp& mdp);

/// N_Psi(s,a): actions at s in the same pair block as (s,a).
Index n_psi(const FiniteMdp& mdp, const VisibleSymmetry& sym, Index pair);
Index n_psi(const FiniteMdp& mdp, const VisibleSymmetry& sym, std::string_view s, std::string_view a);

/// Quotient MDP together with the bookkeeping needed to pull policies back.
struct Quotient {
    FiniteMdp mdp;
    /// Quotient pair index of every pair block.
    std::vector<Index> pair_of_block;
    /// Smallest member (pair index in the original MDP) of every pair block.
    std::vector<Index> representative;
    /// Smallest member state of every state block.
    std::vector<Index> state_representative;
};

/**
 * Builds M/~.
 *
 * Quotient state k is state block k, labelled "[rep]". Pair blocks keep the
 * representative's action label when the symmetry is simple and become "(k)"
 * otherwise. Dynamics come from each block's smallest member; every other
 * member is then audited against it.
 *
 * Throws InvalidSymmetryError if the symmetry check fails and
 * RepresentativeMismatchError if the audit does.
 */
Quotient build_quotient(const FiniteMdp& mdp, const VisibleSymmetry& sym, double tol = kTolerance);

/// pi'(s,a) = pi([(s,a)]) / N_Psi(s,a). Throws BlockMismatchError for a policy of another MDP.
Policy pullback_policy(const FiniteMdp& mdp, const VisibleSymmetry& sym, const Quotient& quotient,
                       const Policy& quotient_policy);

/// p(X, r | s, a) for every state block X, sorted by (block, reward).
struct BlockOutcome {
    Index block;
    double reward;
    double prob;
};
std::vector<BlockOutcome> block_distribution(const FiniteMdp& mdp, const std::vector<Index>& state_block, Index pair,
                                             double tol = kTolerance);

/// Empty when the two distributions agree within tol, else a description of the first difference.
std::optional<std::string> compare_block_distributions(const std::vector<BlockOutcome>& a,
                                                       const std::vector<BlockOutcome>& b, double tol = kTolerance);

}  // namespace nvq
