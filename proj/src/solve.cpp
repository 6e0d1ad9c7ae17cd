#include "sg/solve.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "internal.hpp"
#include "sg/errors.hpp"

namespace sg {

namespace detail {

StateBackup backup_state(const StochasticGame& game, const ValueVector& lower,
                         const ValueVector& upper, StateId s) {
    const bool is_max = game.owner(s) == Player::maximizer;
    const auto& acts = game.actions(s);
    StateBackup out{0, 0, 0};
    for (std::uint32_t a = 0; a < acts.size(); ++a) {
        double vl = 0, vu = 0;
        for (const Branch& br : acts[a].branches) {
            vl += br.prob_f * lower[br.target];
            vu += br.prob_f * upper[br.target];
        }
        if (a == 0) {
            out = {vl, vu, 0};
        } else if (is_max) {
            if (vl > out.lower) {
                out.lower = vl;
                out.arg_lower = a;
            }
            out.upper = std::max(out.upper, vu);
        } else {
            if (vl < out.lower) {
                out.lower = vl;
                out.arg_lower = a;
            }
            out.upper = std::min(out.upper, vu);
        }
    }
    return out;
}

}  // namespace detail

Bounds initial_bounds(const StochasticGame& game) {
    Bounds b;
    b.lower.assign(game.state_count(), 0.0);
    b.upper.assign(game.state_count(), 1.0);
    b.lower[game.target()] = 1.0;
    b.upper[game.sink()] = 0.0;
    b.improving.assign(game.state_count(), -1);
    return b;
}

ValueVector bellman_update(const StochasticGame& game, const ValueVector& f) {
    ValueVector out(game.state_count());
    for (StateId s = 0; s < game.state_count(); ++s) {
        bool is_max = game.owner(s) == Player::maximizer;
        double best = 0;
        for (std::uint32_t a = 0; a < game.actions(s).size(); ++a) {
            double v = action_value(game, f, s, a);
            if (a == 0 || (is_max ? v > best : v < best)) best = v;
        }
        out[s] = best;
    }
    return out;
}

namespace {

// Synchronous step over both bounds, clamped so the documented monotonicity holds
// bit-for-bit even when rounding nudges a backup the wrong way. Records the argmax
// action wherever the lower bound strictly rises.
Bounds bellman_pass(const StochasticGame& game, const Bounds& in) {
    const StateId n = game.state_count();
    Bounds out;
    out.lower.resize(n);
    out.upper.resize(n);
    out.improving = in.improving;
    for (StateId s = 0; s < n; ++s) {
        detail::StateBackup bk = detail::backup_state(game, in.lower, in.upper, s);
        if (game.owner(s) == Player::maximizer && bk.lower > in.lower[s])
            out.improving[s] = static_cast<std::int32_t>(bk.arg_lower);
        out.lower[s] = std::max(in.lower[s], bk.lower);
        out.upper[s] = std::min(in.upper[s], bk.upper);
    }
    return out;
}

bool contains_state(const StateSet& states, StateId s) {
    return std::binary_search(states.begin(), states.end(), s);
}

double gap_at(const Bounds& b, StateId s) { return b.upper[s] - b.lower[s]; }

double max_gap(const Bounds& b) {
    double g = 0;
    for (std::size_t s = 0; s < b.lower.size(); ++s)
        g = std::max(g, b.upper[s] - b.lower[s]);
    return g;
}

SolveReport run_bvi(const StochasticGame& game, const BviOptions& options, bool deflating) {
    auto start = std::chrono::steady_clock::now();
    SolveReport r;
    r.method = deflating ? "bvi" : "naive-bvi";
    r.epsilon = options.epsilon;
    r.explored_states = game.state_count();
    r.bounds = initial_bounds(game);
    for (std::uint64_t iter = 1; iter <= options.max_iters; ++iter) {
        Bounds next = bellman_pass(game, r.bounds);
        if (deflating && options.deflate_every > 0 && iter % options.deflate_every == 0) {
            std::vector<EndComponent> msecs = find_msec(game, next.lower);
            r.msec_count_last = msecs.size();
            for (const EndComponent& component : msecs) {
                if (contains_state(component.states, game.target())) continue;
                next.upper = deflate(game, component, next.upper);
                ++r.deflate_calls;
            }
        }
        r.bounds = std::move(next);
        r.iterations = iter;
        if (options.observer) options.observer(iter, r.bounds);
        if (options.record_trace)
            r.trace.push_back({iter, r.bounds.lower[game.initial()],
                               r.bounds.upper[game.initial()], r.deflate_calls,
                               game.state_count()});
        double gap = options.converge_all_states ? max_gap(r.bounds)
                                                 : gap_at(r.bounds, game.initial());
        if (gap < options.epsilon) {
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

}  // namespace

ValueVector deflate(const StochasticGame& game, const EndComponent& component,
                    const ValueVector& f) {
    double cap = best_exit(game, component.states, f, Player::maximizer).value;
    ValueVector out = f;
    for (StateId s : component.states) out[s] = std::min(out[s], cap);
    return out;
}

ExactVector deflate_exact(const StochasticGame& game, const EndComponent& component,
                          const ExactVector& f) {
    Rational cap = best_exit_exact(game, component.states, f, Player::maximizer).value;
    ExactVector out = f;
    for (StateId s : component.states)
        if (out[s] > cap) out[s] = cap;
    return out;
}

Bounds bvi_update(const StochasticGame& game, const Bounds& b, bool do_deflate) {
    Bounds next = bellman_pass(game, b);
    if (do_deflate) {
        for (const EndComponent& component : find_msec(game, next.lower)) {
            if (contains_state(component.states, game.target())) continue;
            next.upper = deflate(game, component, next.upper);
        }
    }
    return next;
}

SolveReport solve_bvi(const StochasticGame& game, const BviOptions& options) {
    return run_bvi(game, options, true);
}

SolveReport solve_naive_bvi(const StochasticGame& game, const BviOptions& options) {
    return run_bvi(game, options, false);
}

SolveReport solve_vi_classic(const StochasticGame& game, const ViOptions& options) {
    auto start = std::chrono::steady_clock::now();
    SolveReport r;
    r.method = "vi";
    r.epsilon = options.delta;
    r.explored_states = game.state_count();
    r.bounds = initial_bounds(game);
    for (std::uint64_t iter = 1; iter <= options.max_iters; ++iter) {
        double step = 0;
        ValueVector next(game.state_count());
        for (StateId s = 0; s < game.state_count(); ++s) {
            detail::StateBackup bk =
                detail::backup_state(game, r.bounds.lower, r.bounds.lower, s);
            if (game.owner(s) == Player::maximizer && bk.lower > r.bounds.lower[s])
                r.bounds.improving[s] = static_cast<std::int32_t>(bk.arg_lower);
            next[s] = std::max(r.bounds.lower[s], bk.lower);
            step = std::max(step, next[s] - r.bounds.lower[s]);
        }
        r.bounds.lower = std::move(next);
        r.iterations = iter;
        if (options.record_trace)
            r.trace.push_back({iter, r.bounds.lower[game.initial()],
                               r.bounds.upper[game.initial()], 0, game.state_count()});
        if (step < options.delta) break;
    }
    // The delta criterion is no certificate, so converged stays false; limit_hit still
    // tells a budget stop apart from a delta stop.
    r.iteration_limit_hit = r.iterations == options.max_iters;
    r.lower_initial = r.bounds.lower[game.initial()];
    r.upper_initial = r.bounds.upper[game.initial()];
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
    return r;
}

StochasticGame collapse_sec(const StochasticGame& game, const StateSet& component,
                            bool certified) {
    if (!certified)
        throw NotCertified("collapse_sec: component lacks a certificate");
    if (component.empty())
        throw std::invalid_argument("collapse_sec: empty component");
    if (contains_state(component, game.target()) || contains_state(component, game.sink()))
        throw std::invalid_argument("collapse_sec: component touches target or sink");

    const StateId n = game.state_count();
    std::vector<char> member(n, 0);
    for (StateId s : component) member[s] = 1;

    std::string merged_name;
    for (StateId s : component) merged_name += game.name(s);

    // Kept actions: the Maximizer members' exiting ones, else every staying action.
    struct Kept {
        StateId from;
        std::uint32_t index;
    };
    std::vector<Kept> exiting, staying;
    for (StateId s : component) {
        for (std::uint32_t a = 0; a < game.actions(s).size(); ++a) {
            bool leaves = false;
            for (const Branch& br : game.actions(s)[a].branches)
                if (!member[br.target]) {
                    leaves = true;
                    break;
                }
            if (leaves) {
                if (game.owner(s) == Player::maximizer) exiting.push_back({s, a});
            } else {
                staying.push_back({s, a});
            }
        }
    }
    const std::vector<Kept>& kept = exiting.empty() ? staying : exiting;

    GameBuilder b;
    std::vector<StateId> remap(n);
    StateId merged = 0;
    bool merged_added = false;
    for (StateId s = 0; s < n; ++s) {
        if (member[s]) {
            if (!merged_added) {
                merged = b.add_state(merged_name, Player::maximizer);
                merged_added = true;
            }
            remap[s] = merged;
        } else {
            remap[s] = b.add_state(game.name(s), game.owner(s));
        }
    }

    auto add_remapped = [&](StateId new_state, const Action& act, const std::string& label) {
        b.add_action(new_state, label);
        // Coalesce the mass that now points at the same new state.
        std::vector<std::pair<StateId, Rational>> mass;
        for (const Branch& br : act.branches) {
            StateId t = remap[br.target];
            auto it = std::find_if(mass.begin(), mass.end(),
                                   [&](const auto& p) { return p.first == t; });
            if (it == mass.end())
                mass.emplace_back(t, br.prob);
            else
                it->second += br.prob;
        }
        for (const auto& [t, p] : mass) b.add_branch(new_state, t, p);
    };

    std::vector<std::string> used;
    for (const Kept& k : kept) {
        const Action& act = game.actions(k.from)[k.index];
        std::string label = act.label;
        if (std::find(used.begin(), used.end(), label) != used.end())
            label = game.name(k.from) + "." + label;
        for (int suffix = 2; std::find(used.begin(), used.end(), label) != used.end();
             ++suffix)
            label = game.name(k.from) + "." + act.label + "#" + std::to_string(suffix);
        used.push_back(label);
        add_remapped(merged, act, label);
    }
    for (StateId s = 0; s < n; ++s) {
        if (member[s] || game.is_terminal(s)) continue;
        for (const Action& act : game.actions(s)) add_remapped(remap[s], act, act.label);
    }

    b.set_initial(remap[game.initial()]);
    b.set_target(remap[game.target()]);
    b.set_sink(remap[game.sink()]);
    return b.build();
}

std::pair<Strategy, Strategy> extract_strategies(const StochasticGame& game, const Bounds& b) {
    Strategy max_strategy{Player::maximizer,
                          std::vector<std::int32_t>(game.state_count(), -1)};
    Strategy min_strategy{Player::minimizer,
                          std::vector<std::int32_t>(game.state_count(), -1)};
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.owner(s) == Player::maximizer) {
            if (b.improving[s] >= 0) {
                max_strategy.choice[s] = b.improving[s];
            } else {
                std::uint32_t best = 0;
                double bv = action_value(game, b.lower, s, 0);
                for (std::uint32_t a = 1; a < game.actions(s).size(); ++a) {
                    double v = action_value(game, b.lower, s, a);
                    if (v > bv) {
                        bv = v;
                        best = a;
                    }
                }
                max_strategy.choice[s] = static_cast<std::int32_t>(best);
            }
        } else {
            std::uint32_t best = 0;
            double bv = action_value(game, b.upper, s, 0);
            for (std::uint32_t a = 1; a < game.actions(s).size(); ++a) {
                double v = action_value(game, b.upper, s, a);
                if (v < bv) {
                    bv = v;
                    best = a;
                }
            }
            min_strategy.choice[s] = static_cast<std::int32_t>(best);
        }
    }
    return {std::move(max_strategy), std::move(min_strategy)};
}

}  // namespace sg
