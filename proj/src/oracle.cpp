#include "sg/oracle.hpp"

#include <cstdint>
#include <stdexcept>

#include "sg/errors.hpp"
#include "sg/graph.hpp"

namespace sg {

namespace {

// Exact reachability values of the chain induced by fixing one action per state.
// States with no path to the target are pinned to 0 first; that selects the least
// solution of the Bellman system, which is the reachability probability.
ExactVector chain_values(const StochasticGame& game, const std::vector<std::uint32_t>& choice) {
    const StateId n = game.state_count();
    auto chosen = [&](StateId s) -> const Action& { return game.actions(s)[choice[s]]; };

    std::vector<char> reaches(n, 0);
    reaches[game.target()] = 1;
    for (bool changed = true; changed;) {
        changed = false;
        for (StateId s = 0; s < n; ++s) {
            if (reaches[s]) continue;
            for (const Branch& br : chosen(s).branches)
                if (reaches[br.target]) {
                    reaches[s] = 1;
                    changed = true;
                    break;
                }
        }
    }

    ExactVector values(n, Rational(0));
    values[game.target()] = 1;

    std::vector<StateId> unknown;
    std::vector<std::int32_t> row_of(n, -1);
    for (StateId s = 0; s < n; ++s)
        if (reaches[s] && s != game.target()) {
            row_of[s] = static_cast<std::int32_t>(unknown.size());
            unknown.push_back(s);
        }
    const std::size_t m = unknown.size();
    if (m == 0) return values;

    // V(s) = sum p * V(t); unknowns on the left, the target's mass on the right.
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        a[i][i] = 1;
        for (const Branch& br : chosen(unknown[i]).branches) {
            if (br.target == game.target())
                a[i][m] += br.prob;
            else if (row_of[br.target] >= 0)
                a[i][static_cast<std::size_t>(row_of[br.target])] -= br.prob;
        }
    }

    // Every unknown state exits the unknown set with positive probability, so the
    // system is nonsingular; a missing pivot would mean the restriction is wrong.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        while (pivot < m && a[pivot][col] == 0) ++pivot;
        if (pivot == m) throw std::logic_error("chain_values: singular system");
        std::swap(a[col], a[pivot]);
        for (std::size_t j = col + 1; j <= m; ++j) a[col][j] /= a[col][col];
        a[col][col] = 1;
        for (std::size_t row = 0; row < m; ++row) {
            if (row == col || a[row][col] == 0) continue;
            Rational factor = a[row][col];
            for (std::size_t j = col; j <= m; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    for (std::size_t i = 0; i < m; ++i) values[unknown[i]] = a[i][m];
    return values;
}

struct Odometer {
    std::vector<StateId> positions;
    std::vector<std::uint32_t> sizes;

    void add(StateId s, std::size_t action_count) {
        positions.push_back(s);
        sizes.push_back(static_cast<std::uint32_t>(action_count));
    }
    bool advance(std::vector<std::uint32_t>& choice) const {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (++choice[positions[i]] < sizes[i]) return true;
            choice[positions[i]] = 0;
        }
        return false;
    }
};

}  // namespace

ExactVector mc_reach_prob(const StochasticGame& chain) {
    for (StateId s = 0; s < chain.state_count(); ++s)
        if (chain.actions(s).size() != 1)
            throw ValidationError("mc_reach_prob: state '" + chain.name(s) + "' has " +
                                  std::to_string(chain.actions(s).size()) +
                                  " actions, expected exactly 1");
    return chain_values(chain, std::vector<std::uint32_t>(chain.state_count(), 0));
}

std::uint64_t strategy_pair_count(const StochasticGame& game) {
    std::uint64_t count = 1;
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.is_terminal(s)) continue;
        std::uint64_t k = game.actions(s).size();
        if (count > UINT64_MAX / k) return UINT64_MAX;
        count *= k;
    }
    return count;
}

ExactVector solve_exact(const StochasticGame& game, std::uint64_t max_pairs) {
    std::uint64_t pairs = strategy_pair_count(game);
    if (pairs > max_pairs)
        throw BudgetExceeded("solve_exact: " + std::to_string(pairs) +
                                 " strategy pairs exceed the budget of " +
                                 std::to_string(max_pairs),
                             static_cast<double>(pairs));

    const StateId n = game.state_count();
    Odometer max_odo, min_odo;
    for (StateId s = 0; s < n; ++s) {
        if (game.is_terminal(s)) continue;
        if (game.owner(s) == Player::maximizer)
            max_odo.add(s, game.actions(s).size());
        else
            min_odo.add(s, game.actions(s).size());
    }

    // Some Maximizer strategy is optimal at every state at once, so the pointwise
    // maximum over Maximizer strategies of the Minimizer's pointwise best reply is
    // the value vector itself.
    std::vector<std::uint32_t> choice(n, 0);
    ExactVector best(n, Rational(0));
    do {
        for (StateId s : min_odo.positions) choice[s] = 0;
        ExactVector reply = chain_values(game, choice);
        while (min_odo.advance(choice)) {
            ExactVector candidate = chain_values(game, choice);
            for (StateId s = 0; s < n; ++s)
                if (candidate[s] < reply[s]) reply[s] = candidate[s];
        }
        for (StateId s = 0; s < n; ++s)
            if (reply[s] > best[s]) best[s] = reply[s];
    } while (max_odo.advance(choice));
    return best;
}

bool certify_sec(const StochasticGame& game, const StateSet& component,
                 const ExactVector& values) {
    if (component.empty()) return false;
    ExitValueExact exit = best_exit_exact(game, component, values, Player::maximizer);
    for (StateId s : component)
        if (values[s] != exit.value) return false;
    return true;
}

std::vector<BoundViolation> check_bounds(const StochasticGame& game, const Bounds& b,
                                         const ExactVector& values, double tol) {
    std::vector<BoundViolation> violations;
    Rational slack = rational_from_double(tol);
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (rational_from_double(b.lower[s]) > values[s] + slack)
            violations.push_back({s, true, b.lower[s]});
        if (rational_from_double(b.upper[s]) < values[s] - slack)
            violations.push_back({s, false, b.upper[s]});
    }
    return violations;
}

StochasticGame apply_strategy(const StochasticGame& game, const Strategy& strategy) {
    GameBuilder b;
    for (StateId s = 0; s < game.state_count(); ++s) b.add_state(game.name(s), game.owner(s));
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.is_terminal(s)) continue;
        bool fixed = game.owner(s) == strategy.player;
        if (fixed) {
            std::int32_t c = strategy.choice[s];
            if (c < 0 || static_cast<std::size_t>(c) >= game.actions(s).size())
                throw std::invalid_argument("apply_strategy: no choice for state '" +
                                            game.name(s) + "'");
        }
        for (std::size_t a = 0; a < game.actions(s).size(); ++a) {
            if (fixed && a != static_cast<std::size_t>(strategy.choice[s])) continue;
            const Action& act = game.actions(s)[a];
            b.add_action(s, act.label);
            for (const Branch& br : act.branches) b.add_branch(s, br.target, br.prob);
        }
    }
    b.set_initial(game.initial());
    b.set_target(game.target());
    b.set_sink(game.sink());
    return b.build();
}

}  // namespace sg
