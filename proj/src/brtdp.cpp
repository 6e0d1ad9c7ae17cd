#include "sg/brtdp.hpp"

#include <algorithm>
#include <chrono>

#include "internal.hpp"
#include "sg/graph.hpp"

namespace sg {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t x = next();
        if (x >= threshold) return x % n;
    }
}

std::vector<std::uint32_t> best_actions(const StochasticGame& game, const Bounds& b,
                                        StateId s) {
    bool is_max = game.owner(s) == Player::maximizer;
    const ValueVector& f = is_max ? b.upper : b.lower;
    std::vector<double> values(game.actions(s).size());
    double best = 0;
    for (std::uint32_t a = 0; a < values.size(); ++a) {
        values[a] = action_value(game, f, s, a);
        if (a == 0 || (is_max ? values[a] > best : values[a] < best)) best = values[a];
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t a = 0; a < values.size(); ++a)
        if (values[a] == best) out.push_back(a);
    return out;
}

namespace {

StateId sample_successor(const Bounds& b, SplitMix64& rng, const Action& act,
                         bool weighted) {
    if (weighted) {
        double total = 0;
        for (const Branch& br : act.branches)
            total += br.prob_f * (b.upper[br.target] - b.lower[br.target]);
        if (total > 0) {
            double r = rng.next_double() * total, acc = 0;
            for (const Branch& br : act.branches) {
                acc += br.prob_f * (b.upper[br.target] - b.lower[br.target]);
                if (acc > r) return br.target;
            }
            return act.branches.back().target;
        }
        // All gaps closed on this action: fall through to plain probability.
    }
    double r = rng.next_double(), acc = 0;
    for (const Branch& br : act.branches) {
        acc += br.prob_f;
        if (acc > r) return br.target;
    }
    return act.branches.back().target;
}

}  // namespace

SimulationPath simulate_path(const StochasticGame& game, const Bounds& b, SplitMix64& rng,
                             std::uint64_t k, const BrtdpOptions& options) {
    SimulationPath path;
    StateId s = game.initial();
    for (;;) {
        path.states.push_back(s);
        if (game.is_terminal(s)) break;
        if (options.stop_at_converged && b.upper[s] == b.lower[s]) break;
        if (path.states.size() >= k) {
            path.too_long = true;
            break;
        }
        std::vector<std::uint32_t> best = best_actions(game, b, s);
        const Action& act = game.actions(s)[best[rng.next_below(best.size())]];
        s = sample_successor(b, rng, act, options.weighted_sampling);
    }
    return path;
}

void update_along_path(const StochasticGame& game, Bounds& b, const SimulationPath& path) {
    for (auto it = path.states.rbegin(); it != path.states.rend(); ++it) {
        StateId s = *it;
        if (game.is_terminal(s)) continue;
        detail::StateBackup bk = detail::backup_state(game, b.lower, b.upper, s);
        if (game.owner(s) == Player::maximizer && bk.lower > b.lower[s])
            b.improving[s] = static_cast<std::int32_t>(bk.arg_lower);
        b.lower[s] = std::max(b.lower[s], bk.lower);
        b.upper[s] = std::min(b.upper[s], bk.upper);
    }
}

SolveReport solve_brtdp(const StochasticGame& game, const BrtdpOptions& options) {
    auto start = std::chrono::steady_clock::now();
    const StateId n = game.state_count();
    SolveReport r;
    r.method = "brtdp";
    r.epsilon = options.epsilon;
    r.bounds = initial_bounds(game);
    SplitMix64 rng(options.seed);

    std::vector<char> visited_mask(n, 0);
    visited_mask[game.initial()] = 1;
    for (const Action& act : game.actions(game.initial()))
        for (const Branch& br : act.branches) visited_mask[br.target] = 1;

    auto visited_set = [&] {
        StateSet v;
        for (StateId s = 0; s < n; ++s)
            if (visited_mask[s]) v.push_back(s);
        return v;
    };

    for (std::uint64_t trial = 1; trial <= options.max_trials; ++trial) {
        // The step bound tracks the current restricted size: visited states, their
        // one-step successors, and the two sinks.
        std::vector<char> included = visited_mask;
        included[game.target()] = 1;
        included[game.sink()] = 1;
        for (StateId s = 0; s < n; ++s)
            if (visited_mask[s])
                for (const Action& act : game.actions(s))
                    for (const Branch& br : act.branches) included[br.target] = 1;
        std::uint64_t k = 2 * static_cast<std::uint64_t>(
                                  std::count(included.begin(), included.end(), char(1)));

        SimulationPath path = simulate_path(game, r.bounds, rng, k, options);
        for (StateId s : path.states) visited_mask[s] = 1;
        update_along_path(game, r.bounds, path);

        StateSet visited = visited_set();
        RestrictedGame rest = restricted_game(game, visited);
        ValueVector rest_lower(rest.to_original.size()), rest_upper(rest.to_original.size());
        for (std::size_t i = 0; i < rest.to_original.size(); ++i) {
            rest_lower[i] = r.bounds.lower[rest.to_original[i]];
            rest_upper[i] = r.bounds.upper[rest.to_original[i]];
        }
        std::vector<EndComponent> msecs = find_msec(rest.game, rest_lower);
        r.msec_count_last = msecs.size();
        for (const EndComponent& component : msecs) {
            bool skip = false;
            for (StateId s : component.states) {
                StateId orig = rest.to_original[s];
                // {target} must keep its bound, and components reached only through
                // the synthetic frontier loops are not end components of the real game.
                if (orig == game.target() || !visited_mask[orig]) {
                    skip = true;
                    break;
                }
            }
            if (skip) continue;
            ValueVector capped = deflate(rest.game, component, rest_upper);
            for (StateId s : component.states) {
                rest_upper[s] = capped[s];
                r.bounds.upper[rest.to_original[s]] =
                    std::min(r.bounds.upper[rest.to_original[s]], capped[s]);
            }
            ++r.deflate_calls;
        }

        r.iterations = trial;
        r.explored_states = visited.size();
        if (options.record_trace)
            r.trace.push_back({trial, r.bounds.lower[game.initial()],
                               r.bounds.upper[game.initial()], r.deflate_calls,
                               r.explored_states});
        if (r.bounds.upper[game.initial()] - r.bounds.lower[game.initial()] <
            options.epsilon) {
            r.converged = true;
            break;
        }
    }
    r.iteration_limit_hit = !r.converged;
    r.lower_initial = r.bounds.lower[game.initial()];
    r.upper_initial = r.bounds.upper[game.initial()];
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
    return r;
}

}  // namespace sg
