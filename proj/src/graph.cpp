#include "sg/graph.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sg {

namespace {

constexpr std::uint32_t kNoComponent = std::numeric_limits<std::uint32_t>::max();

struct MaskedScc {
    std::vector<StateSet> components;  // reverse topological, members sorted
    std::vector<std::uint32_t> component_of;
};

MaskedScc tarjan(StateId n, const std::vector<std::vector<StateId>>& succ,
                 const std::vector<char>& alive) {
    constexpr std::uint32_t unset = kNoComponent;
    MaskedScc result;
    result.component_of.assign(n, kNoComponent);
    std::vector<std::uint32_t> index(n, unset), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<StateId> stack;
    std::uint32_t next_index = 0;

    struct Frame {
        StateId s;
        std::size_t next_child;
    };
    std::vector<Frame> call;

    for (StateId root = 0; root < n; ++root) {
        if (!alive[root] || index[root] != unset) continue;
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        call.push_back({root, 0});
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next_child < succ[f.s].size()) {
                StateId t = succ[f.s][f.next_child++];
                if (index[t] == unset) {
                    index[t] = low[t] = next_index++;
                    stack.push_back(t);
                    on_stack[t] = 1;
                    call.push_back({t, 0});  // invalidates f
                } else if (on_stack[t]) {
                    low[f.s] = std::min(low[f.s], index[t]);
                }
            } else {
                if (low[f.s] == index[f.s]) {
                    StateSet component;
                    StateId t;
                    do {
                        t = stack.back();
                        stack.pop_back();
                        on_stack[t] = 0;
                        result.component_of[t] =
                            static_cast<std::uint32_t>(result.components.size());
                        component.push_back(t);
                    } while (t != f.s);
                    std::sort(component.begin(), component.end());
                    result.components.push_back(std::move(component));
                }
                StateId done = f.s;
                call.pop_back();
                if (!call.empty())
                    low[call.back().s] = std::min(low[call.back().s], low[done]);
            }
        }
    }
    return result;
}

using AllowedMask = std::vector<std::vector<char>>;

AllowedMask full_mask(const StochasticGame& game) {
    AllowedMask allowed(game.state_count());
    for (StateId s = 0; s < game.state_count(); ++s)
        allowed[s].assign(game.actions(s).size(), 1);
    return allowed;
}

// Maximal end components of the sub-availability `allowed`. Alternates two closure
// steps until stable: (1) a state with no usable action dies and actions branching
// into dead states become unusable, (2) actions whose branches cross SCC borders
// become unusable. The surviving SCCs with their surviving actions are the MECs,
// and the action sets are maximal because only provably leaving pairs were removed.
std::vector<EndComponent> mec_core(const StochasticGame& game, AllowedMask allowed) {
    const StateId n = game.state_count();
    std::vector<char> alive(n, 1);
    for (;;) {
        for (bool changed = true; changed;) {
            changed = false;
            for (StateId s = 0; s < n; ++s) {
                if (!alive[s]) continue;
                bool any = false;
                for (std::size_t a = 0; a < game.actions(s).size(); ++a) {
                    if (!allowed[s][a]) continue;
                    bool stays = true;
                    for (const Branch& br : game.actions(s)[a].branches)
                        if (!alive[br.target]) {
                            stays = false;
                            break;
                        }
                    if (!stays) {
                        allowed[s][a] = 0;
                        changed = true;
                    } else {
                        any = true;
                    }
                }
                if (!any) {
                    alive[s] = 0;
                    changed = true;
                }
            }
        }

        std::vector<std::vector<StateId>> succ(n);
        for (StateId s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t a = 0; a < game.actions(s).size(); ++a)
                if (allowed[s][a])
                    for (const Branch& br : game.actions(s)[a].branches)
                        succ[s].push_back(br.target);
        }
        MaskedScc scc = tarjan(n, succ, alive);

        bool changed = false;
        for (StateId s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t a = 0; a < game.actions(s).size(); ++a) {
                if (!allowed[s][a]) continue;
                for (const Branch& br : game.actions(s)[a].branches)
                    if (scc.component_of[br.target] != scc.component_of[s]) {
                        allowed[s][a] = 0;
                        changed = true;
                        break;
                    }
            }
        }
        if (!changed) {
            std::vector<EndComponent> out;
            for (StateSet& members : scc.components) {
                EndComponent ec;
                ec.states = std::move(members);
                for (StateId s : ec.states) {
                    std::vector<std::uint32_t> acts;
                    for (std::size_t a = 0; a < game.actions(s).size(); ++a)
                        if (allowed[s][a]) acts.push_back(static_cast<std::uint32_t>(a));
                    ec.actions.push_back(std::move(acts));
                }
                out.push_back(std::move(ec));
            }
            std::sort(out.begin(), out.end(),
                      [](const EndComponent& x, const EndComponent& y) {
                          return x.states.front() < y.states.front();
                      });
            return out;
        }
    }
}

std::vector<char> member_mask(StateId n, const StateSet& component) {
    std::vector<char> mask(n, 0);
    for (StateId s : component) mask[s] = 1;
    return mask;
}

// Shared scan for both arithmetics: Value is double or Rational.
template <typename Value, typename Eval>
auto exit_scan(const StochasticGame& game, const StateSet& component, Player player,
               Value none, bool want_max, Eval eval) {
    std::vector<char> inside = member_mask(game.state_count(), component);
    Value best = none;
    std::optional<std::pair<StateId, std::uint32_t>> witness;
    for (StateId s : component) {
        if (game.owner(s) != player) continue;
        for (std::size_t a = 0; a < game.actions(s).size(); ++a) {
            bool leaves = false;
            for (const Branch& br : game.actions(s)[a].branches)
                if (!inside[br.target]) {
                    leaves = true;
                    break;
                }
            if (!leaves) continue;
            Value v = eval(s, static_cast<std::uint32_t>(a));
            if (!witness || (want_max ? v > best : v < best)) {
                best = v;
                witness = {s, static_cast<std::uint32_t>(a)};
            }
        }
    }
    return std::pair<Value, decltype(witness)>{best, witness};
}

}  // namespace

SccResult scc_decomposition(const StochasticGame& game) {
    const StateId n = game.state_count();
    std::vector<std::vector<StateId>> succ(n);
    for (StateId s = 0; s < n; ++s)
        for (const Action& act : game.actions(s))
            for (const Branch& br : act.branches) succ[s].push_back(br.target);
    MaskedScc scc = tarjan(n, succ, std::vector<char>(n, 1));
    return {std::move(scc.components), std::move(scc.component_of)};
}

std::vector<EndComponent> mec_decomposition(const StochasticGame& game) {
    return mec_core(game, full_mask(game));
}

ExitValue best_exit(const StochasticGame& game, const StateSet& component,
                    const ValueVector& f, Player player) {
    bool is_max = player == Player::maximizer;
    auto [value, witness] =
        exit_scan(game, component, player, is_max ? 0.0 : 1.0, is_max,
                  [&](StateId s, std::uint32_t a) { return action_value(game, f, s, a); });
    return {value, witness};
}

ExitValueExact best_exit_exact(const StochasticGame& game, const StateSet& component,
                               const ExactVector& f, Player player) {
    bool is_max = player == Player::maximizer;
    auto [value, witness] = exit_scan(
        game, component, player, is_max ? Rational(0) : Rational(1), is_max,
        [&](StateId s, std::uint32_t a) { return action_value_exact(game, f, s, a); });
    return {value, witness};
}

std::vector<EndComponent> find_msec(const StochasticGame& game, const ValueVector& f) {
    AllowedMask allowed = full_mask(game);
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.owner(s) != Player::minimizer) continue;
        for (std::size_t a = 0; a < game.actions(s).size(); ++a)
            if (action_value(game, f, s, static_cast<std::uint32_t>(a)) > f[s])
                allowed[s][a] = 0;
    }
    return mec_core(game, std::move(allowed));
}

std::vector<EndComponent> find_msec_exact(const StochasticGame& game, const ExactVector& f) {
    AllowedMask allowed = full_mask(game);
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.owner(s) != Player::minimizer) continue;
        for (std::size_t a = 0; a < game.actions(s).size(); ++a)
            if (action_value_exact(game, f, s, static_cast<std::uint32_t>(a)) > f[s])
                allowed[s][a] = 0;
    }
    return mec_core(game, std::move(allowed));
}

bool is_bec(const StochasticGame& game, const StateSet& component, const ValueVector& f) {
    return best_exit(game, component, f, Player::minimizer).value >
           best_exit(game, component, f, Player::maximizer).value;
}

RestrictedGame restricted_game(const StochasticGame& game, const StateSet& visited) {
    const StateId n = game.state_count();
    std::vector<char> is_visited(n, 0);
    for (StateId s : visited) is_visited[s] = 1;
    if (!is_visited[game.initial()])
        throw std::invalid_argument("restricted_game: initial state not visited");

    std::vector<char> included = is_visited;
    included[game.target()] = 1;
    included[game.sink()] = 1;
    for (StateId s : visited)
        for (const Action& act : game.actions(s))
            for (const Branch& br : act.branches) included[br.target] = 1;

    std::vector<StateId> to_original;
    std::vector<std::int32_t> from_original(n, -1);
    GameBuilder b;
    for (StateId s = 0; s < n; ++s) {
        if (!included[s]) continue;
        from_original[s] = static_cast<std::int32_t>(to_original.size());
        to_original.push_back(s);
        b.add_state(game.name(s), game.owner(s));
    }
    auto remap = [&](StateId s) { return static_cast<StateId>(from_original[s]); };
    for (StateId s : to_original) {
        if (game.is_terminal(s)) continue;  // real loop synthesized by the builder
        StateId rs = remap(s);
        if (is_visited[s]) {
            for (const Action& act : game.actions(s)) {
                b.add_action(rs, act.label);
                for (const Branch& br : act.branches)
                    b.add_branch(rs, remap(br.target), br.prob);
            }
        } else {
            // Frontier placeholder: pessimistic for the Maximizer, value 0 here.
            b.add_action(rs, "bot");
            b.add_branch(rs, rs, Rational(1));
        }
    }
    b.set_initial(remap(game.initial()));
    b.set_target(remap(game.target()));
    b.set_sink(remap(game.sink()));
    return {b.build(), std::move(to_original), std::move(from_original)};
}

}  // namespace sg
