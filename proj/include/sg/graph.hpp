#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sg/game.hpp"

namespace sg {

/// An end component: states plus, per state, the actions that stay inside it.
/// `states` is sorted; `actions[i]` lists indices into actions(states[i]), ascending.
/// The action sets returned by the decompositions are maximal.
struct EndComponent {
    StateSet states;
    std::vector<std::vector<std::uint32_t>> actions;
};

struct SccResult {
    /// Components in reverse topological order: a component never reaches an earlier one.
    std::vector<StateSet> components;
    /// Component index per state.
    std::vector<std::uint32_t> component_of;
};

/// Strongly connected components of the one-step successor graph (every action, every
/// positive branch). Iterative, so chains of any length are fine. Deterministic: states
/// are rooted in index order.
SccResult scc_decomposition(const StochasticGame& game);

/// Maximal end components, sorted by their smallest state index. {target} and {sink}
/// always appear (their self-loops make them ECs). A singleton without a self-looping
/// action is not an EC and is not returned.
std::vector<EndComponent> mec_decomposition(const StochasticGame& game);

struct ExitValue {
    double value;
    /// Attaining state/action pair; empty when no action of that player leaves T.
    std::optional<std::pair<StateId, std::uint32_t>> witness;
};

/// Best value over the given player's T-exiting pairs: an action leaves T when some
/// branch target is outside T. Maximizer takes the max (0 when there is none),
/// Minimizer the min (1 when there is none). First attaining pair wins ties, scanning
/// states then actions in ascending order.
ExitValue best_exit(const StochasticGame& game, const StateSet& component,
                    const ValueVector& f, Player player);

struct ExitValueExact {
    Rational value;
    std::optional<std::pair<StateId, std::uint32_t>> witness;
};

/// Same, in exact arithmetic.
ExitValueExact best_exit_exact(const StochasticGame& game, const StateSet& component,
                               const ExactVector& f, Player player);

/// MECs of the game with every Minimizer action a at s satisfying f(s,a) > f(s) removed
/// first. Comparisons are exact binary64 comparisons, no tolerance. With f equal to the
/// value function this yields exactly the components every Maximizer bound must be
/// deflated through.
std::vector<EndComponent> find_msec(const StochasticGame& game, const ValueVector& f);

/// Exact-arithmetic overload for oracle-level checks.
std::vector<EndComponent> find_msec_exact(const StochasticGame& game, const ExactVector& f);

/// Minimizer's best exit beats Maximizer's: the component supports spurious fixpoints
/// above the value, which is what stalls un-deflated upper bounds.
bool is_bec(const StochasticGame& game, const StateSet& component, const ValueVector& f);

struct RestrictedGame {
    StochasticGame game;
    /// Restricted index -> original index, ascending.
    std::vector<StateId> to_original;
    /// Original index -> restricted index, -1 when absent.
    std::vector<std::int32_t> from_original;
};

/// Subgame over the visited states, their one-step successors, and always target and
/// sink. Visited states keep their full action sets; every other included state gets a
/// single `bot` self-loop (target/sink keep their real loop, which is the same thing).
/// The initial state must be visited.
RestrictedGame restricted_game(const StochasticGame& game, const StateSet& visited);

}  // namespace sg
