#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sg/game.hpp"
#include "sg/graph.hpp"

namespace sg {

/// Lower/upper state bounds. Invariants maintained by every solver here:
/// lower(target) = upper(target) = 1, lower(sink) = upper(sink) = 0, lower <= upper,
/// lower never decreases and upper never increases across updates.
struct Bounds {
    ValueVector lower;
    ValueVector upper;

    /// Per Maximizer state, the action through which lower(s) last strictly increased;
    /// -1 before any increase. Solvers maintain this so a sound Maximizer strategy can
    /// be read off afterwards; a plain argmax over the final lower bound can tie with a
    /// staying action inside an end component and forfeit the bound.
    std::vector<std::int32_t> improving;
};

/// lower = 0 except 1 at the target; upper = 1 except 0 at the sink.
Bounds initial_bounds(const StochasticGame& game);

/// One synchronous Bellman step: out(s) = max/min over a of action_value(game, f, s, a)
/// per the owner of s. Accumulation follows branch order, so results are bit-stable.
/// Terminal self-loops reproduce the pinned 1/0 entries.
ValueVector bellman_update(const StochasticGame& game, const ValueVector& f);

/// Caps f on the component by the Maximizer's best exit, computed once from the given f
/// (no chaining within a call): f'(s) = min(f(s), exit) for s in T, f' = f elsewhere.
ValueVector deflate(const StochasticGame& game, const EndComponent& component,
                    const ValueVector& f);

/// Exact-arithmetic overload; same single-pass contract.
ExactVector deflate_exact(const StochasticGame& game, const EndComponent& component,
                          const ExactVector& f);

/// One bounded step: Bellman on both bounds, then, when do_deflate, every component of
/// find_msec(game, updated lower) except ones containing the target deflates the upper
/// bound. (Deflating {target} would cap it by an empty exit set and break the bounds
/// invariant; nothing else can contain the target.)
Bounds bvi_update(const StochasticGame& game, const Bounds& b, bool do_deflate);

struct TraceRow {
    std::uint64_t iteration;   // iteration for iterative solvers, trial for simulation
    double lower_initial;
    double upper_initial;
    std::uint64_t deflate_calls;  // cumulative; 0 for methods that never deflate
    std::uint64_t visited;        // explored states; |S| for full-sweep methods
};

struct SolveReport {
    std::string method;
    std::uint64_t iterations = 0;
    double lower_initial = 0;
    double upper_initial = 1;
    double epsilon = 0;
    bool converged = false;
    bool iteration_limit_hit = false;
    std::uint64_t deflate_calls = 0;
    std::uint64_t msec_count_last = 0;
    std::uint64_t explored_states = 0;
    double wall_ms = 0;
    Bounds bounds;
    std::vector<TraceRow> trace;  // filled only when requested
};

struct BviOptions {
    double epsilon = 1e-6;
    std::uint64_t max_iters = 10'000'000;
    std::uint32_t deflate_every = 1;  // deflate on iterations n with n % deflate_every == 0
    bool converge_all_states = false; // require the gap below epsilon at every state
    bool record_trace = false;
    /// Called after every iteration with the iteration number and current bounds.
    std::function<void(std::uint64_t, const Bounds&)> observer;
};

/// Bounded value iteration with deflation. Converges on every valid game; stops when
/// the gap at the initial state (or everywhere, on request) is below epsilon, or at
/// max_iters with converged=false and the bounds still valid.
SolveReport solve_bvi(const StochasticGame& game, const BviOptions& options = {});

/// The same loop without deflation. Sound bounds always, convergence only on games
/// whose end components cannot hold the upper bound up; kept as a baseline.
SolveReport solve_naive_bvi(const StochasticGame& game, const BviOptions& options = {});

struct ViOptions {
    double delta = 1e-6;  // stop when the max-norm step change falls below this
    std::uint64_t max_iters = 10'000'000;
    bool record_trace = false;
};

/// Classic value iteration from below. The report's upper bound is the trivial 1 (0 at
/// the sink) and converged is always false: the stop criterion certifies nothing, which
/// is the point of keeping this baseline around.
SolveReport solve_vi_classic(const StochasticGame& game, const ViOptions& options = {});

/// Merges a certified simple end component into one Maximizer state named by the
/// concatenated member names. If the Maximizer has T-exiting actions the merged state
/// keeps exactly those; otherwise it keeps the staying actions. Incoming mass into T is
/// redirected to the merged state and coalesced. Callers certify the component is a SEC
/// (see certify_sec); passing certified=false throws NotCertified, values outside T are
/// preserved only under the certificate.
StochasticGame collapse_sec(const StochasticGame& game, const StateSet& component,
                            bool certified);

/// Reads strategies off converged (or anytime) bounds: the Maximizer plays the recorded
/// last-improving action (argmax over lower, lowest index, when none was recorded); the
/// Minimizer plays the lowest-index argmin over upper.
std::pair<Strategy, Strategy> extract_strategies(const StochasticGame& game, const Bounds& b);

}  // namespace sg
