#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nvq/mdp.hpp"
#include "nvq/policy.hpp"
#include "nvq/symmetry.hpp"

namespace nvq {

/// Outcome of a structural check; `witness` names the first counterexample.
struct CheckResult {
    bool ok = true;
    std::string witness;

    explicit operator bool() const { return ok; }
    static CheckResult pass() { return {}; }
    static CheckResult fail(std::string why) { return {false, std::move(why)}; }
};

/**
 * Relabeling h = (f, {g_s}) keyed by source labels.
 *
 * state_map is f; action_maps[s] is g_s on the admissible actions of s.
 */
struct Relabeling {
    std::map<std::string, std::string> state_map;
    std::map<std::string, std::map<std::string, std::string>> action_maps;
};

Relabeling identity_relabeling(const FiniteMdp& mdp);
/// Throws NotBijectiveError when h is not injective.
Relabeling inverse(const Relabeling& h);

/// Same states, actions and admissible pairs, and p(s'|s,a) equal within tol.
CheckResult same_transition_structure(const FiniteMdp& a, const FiniteMdp& b, double tol = kTolerance);

/// Same transition structure and equal optimal action sets at `gamma`. Near-ties
/// within the argmax tolerance count as ties.
CheckResult check_policy_invariant_shaping(const FiniteMdp& a, const FiniteMdp& b, double gamma,
                                           double tol = kTolerance);

/// Builds the relabeled variant. Throws CoverageError or NotBijectiveError.
FiniteMdp apply_relabeling(const FiniteMdp& mdp, const Relabeling& h, double tol = kTolerance);

/// Bijectivity of f and every g_s, then p(s~,r|s,a) = p'(f(s~),r|f(s),g_s(a)).
CheckResult verify_relabeling(const FiniteMdp& a, const FiniteMdp& b, const Relabeling& h, double tol = kTolerance);

struct EquivalenceResult {
    bool equivalent = false;
    int matched_case = 0;  // 1..4, 0 when no case holds
    std::string witness;
};

/**
 * Decides which equivalence case the supplied witnesses establish:
 *   1. b relabels a via h;
 *   2. same transition structure and optimal actions;
 *   3. `intermediate` relabels a via h, then shapes into b;
 *   4. a shapes into `intermediate`, which h relabels into b.
 * Cases needing a missing witness are skipped. The first case that holds wins.
 */
EquivalenceResult check_equivalence(const FiniteMdp& a, const FiniteMdp& b, const FiniteMdp* intermediate,
                                    const Relabeling* h, double gamma, double tol = kTolerance);

/// (pi o h)(s,a) = pi(g_s(a) | f(s)). Throws DomainMismatchError.
Policy transfer_policy(const FiniteMdp& source, const FiniteMdp& target, const Relabeling& h,
                       const Policy& policy_on_target);

enum class Transform { Shape, Relabel };

/// (M', ~) together with the relabeling of Psi to Psi' from the equivalence.
struct HiddenSymmetry {
    FiniteMdp transformed;
    VisibleSymmetry symmetry;
    Relabeling relabeling;
    std::vector<Transform> provenance;
};

/// Checks ~ on M' and the equivalence of M and M'. `intermediate` is the
/// witness MDP for composite equivalences.
CheckResult validate_hidden_symmetry(const FiniteMdp& original, const HiddenSymmetry& hidden,
                                     const FiniteMdp* intermediate, double gamma, double tol = kTolerance);

/// pi'(s,a) = pi([(f(s), g_s(a))]) / N_Psi(f(s), g_s(a)).
/// Throws InvalidHiddenSymmetryError when h does not reach M' and BlockMismatchError
/// when the policy does not belong to `quotient`.
Policy hidden_pullback(const FiniteMdp& original, const HiddenSymmetry& hidden, const Quotient& quotient,
                       const Policy& quotient_policy);

}  // namespace nvq
