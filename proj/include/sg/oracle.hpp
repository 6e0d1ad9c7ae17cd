#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sg/game.hpp"
#include "sg/solve.hpp"

namespace sg {

/// Exact reachability probabilities of a Markov chain, handed over as a game in which
/// every state has exactly one action (anything else throws ValidationError). States
/// with no path to the target are fixed to 0 first, which selects the least solution;
/// the remaining linear system is solved by exact rational elimination and is
/// nonsingular by construction (asserted, never expected to fire).
ExactVector mc_reach_prob(const StochasticGame& chain);

/// Exact game values by enumeration of deterministic memoryless strategy pairs: for
/// each Maximizer strategy take the pointwise minimum over Minimizer strategies, then
/// the pointwise maximum over Maximizer strategies. Exceeding max_pairs pairs throws
/// BudgetExceeded carrying the required count. Intended for desk-size games; this is
/// the reference the iterative solvers are judged against, so it shares none of their
/// machinery.
ExactVector solve_exact(const StochasticGame& game, std::uint64_t max_pairs = 1'000'000);

/// Number of strategy pairs solve_exact would enumerate (saturates at 2^64-1).
std::uint64_t strategy_pair_count(const StochasticGame& game);

/// Exact check that every state of the component has value equal to the Maximizer's
/// best exit value (the simple-end-component property that licenses collapse_sec).
/// `values` must be the exact value function.
bool certify_sec(const StochasticGame& game, const StateSet& component,
                 const ExactVector& values);

struct BoundViolation {
    StateId state;
    bool lower_side;  // true: lower(s) > v(s) + tol; false: upper(s) < v(s) - tol
    double bound;
};

/// States whose bounds disagree with the exact values beyond tol. Comparisons happen in
/// exact arithmetic (the binary64 bounds and tol embed exactly), so an empty result is
/// a proof, not an approximation.
std::vector<BoundViolation> check_bounds(const StochasticGame& game, const Bounds& b,
                                         const ExactVector& values, double tol);

/// Game with one player's choices fixed to a strategy (their states keep only the
/// chosen action). Used to evaluate an extracted strategy against a best response.
StochasticGame apply_strategy(const StochasticGame& game, const Strategy& strategy);

}  // namespace sg
