#pragma once

#include <cstdint>
#include <vector>

#include "sg/game.hpp"
#include "sg/solve.hpp"

namespace sg {

/// splitmix64 (Steele, Lea, Flood 2014). Chosen because any two implementations of
/// these three constants agree on every draw, which makes seeds portable:
///   state += 0x9e3779b97f4a7c15
///   z = (z ^ z>>30) * 0xbf58476d1ce4e5b9; z = (z ^ z>>27) * 0x94d049bb133111eb; z ^ z>>31
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next();

    /// Uniform in [0,1), 53 random bits.
    double next_double();

    /// Uniform in [0,n), unbiased by rejection. n >= 1.
    std::uint64_t next_below(std::uint64_t n);
};

/// Actions worth following from s: argmax over upper for the Maximizer, argmin over
/// lower for the Minimizer, exact binary64 comparison, every attaining index ascending.
std::vector<std::uint32_t> best_actions(const StochasticGame& game, const Bounds& b,
                                        StateId s);

struct SimulationPath {
    std::vector<StateId> states;  // in visit order, initial first; length <= k
    bool too_long = false;        // stopped by the step bound, not by absorption
};

struct BrtdpOptions {
    double epsilon = 1e-6;
    std::uint64_t max_trials = 1'000'000;
    std::uint64_t seed = 1;
    /// Weight successor sampling by probability times gap instead of probability alone;
    /// falls back to plain probability when every gap on the action is zero.
    bool weighted_sampling = false;
    /// Stop a path at any state whose bounds already agree (the sinks always qualify).
    /// Off reproduces the plain stop-at-terminal behavior.
    bool stop_at_converged = true;
    bool record_trace = false;
};

/// One simulated path from the initial state: uniform choice among best_actions, then a
/// successor draw per the action's distribution (or the weighted variant). Stops on
/// target/sink, on a converged state when enabled, or after k states with too_long set.
SimulationPath simulate_path(const StochasticGame& game, const Bounds& b, SplitMix64& rng,
                             std::uint64_t k, const BrtdpOptions& options = {});

/// Walks the path backwards, recomputing both bounds at each state over all of its
/// actions against the current vectors. Records improving actions like the full-sweep
/// solvers do.
void update_along_path(const StochasticGame& game, Bounds& b, const SimulationPath& path);

/// Simulation-guided bounded iteration: repeat { simulate, update backwards, deflate
/// the upper bound through the MSECs of the game restricted to the visited set } until
/// the gap at the initial state is below epsilon or the trial budget runs out (bounds
/// stay valid either way). The step bound is k = 2 * |restricted states|, recomputed
/// per trial; the restricted set starts as the initial state plus its successors.
/// Components containing the target or any unvisited state are not deflated: the
/// latter exist only through the synthetic frontier self-loops and are no end
/// components of the real game.
SolveReport solve_brtdp(const StochasticGame& game, const BrtdpOptions& options = {});

}  // namespace sg
