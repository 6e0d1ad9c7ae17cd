#include <doctest.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sg/errors.hpp"
#include "sg/format.hpp"
#include "sg/game.hpp"
#include "sg/oracle.hpp"
#include "sg/solve.hpp"
#include "support.hpp"

using namespace sg;

namespace {

StochasticGame two_step_chain() {
    GameBuilder b;
    StateId a = b.add_state("a", Player::maximizer);
    StateId c = b.add_state("c", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    b.add_action(a, "go");
    b.add_branch(a, c, Rational(1));
    b.add_action(c, "spin");
    b.add_branch(c, one, Rational(1, 3));
    b.add_branch(c, a, Rational(1, 3));
    b.add_branch(c, zero, Rational(1, 3));
    b.set_initial(a);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

// x and y only cycle with each other; q reaches the target directly.
StochasticGame looping_chain() {
    GameBuilder b;
    StateId q = b.add_state("q", Player::maximizer);
    StateId x = b.add_state("x", Player::maximizer);
    StateId y = b.add_state("y", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    b.add_action(q, "go");
    b.add_branch(q, one, Rational(1, 2));
    b.add_branch(q, x, Rational(1, 2));
    b.add_action(x, "swap");
    b.add_branch(x, y, Rational(1));
    b.add_action(y, "swap");
    b.add_branch(y, x, Rational(1));
    b.set_initial(q);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

// k Maximizer states with two actions each; the pair count doubles per state.
StochasticGame wide_game(StateId k) {
    GameBuilder b;
    std::vector<StateId> s(k);
    for (StateId i = 0; i < k; ++i)
        s[i] = b.add_state("w" + std::to_string(i), Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    for (StateId i = 0; i < k; ++i) {
        b.add_action(s[i], "hi");
        b.add_branch(s[i], one, Rational(1));
        b.add_action(s[i], "lo");
        b.add_branch(s[i], zero, Rational(1));
    }
    b.set_initial(s[0]);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

}  // namespace

TEST_CASE("chain probabilities solve the linear system exactly") {
    ExactVector v = mc_reach_prob(two_step_chain());
    CHECK(v[0] == Rational(1, 2));
    CHECK(v[1] == Rational(1, 2));
    CHECK(v[2] == Rational(1));
    CHECK(v[3] == Rational(0));
}

TEST_CASE("chain states with no path to the target get the least solution") {
    // The x/y cycle satisfies the fixpoint equations for any constant; only
    // pinning no-path states to 0 first picks the reachability value.
    ExactVector v = mc_reach_prob(looping_chain());
    CHECK(v[0] == Rational(1, 2));
    CHECK(v[1] == Rational(0));
    CHECK(v[2] == Rational(0));
}

TEST_CASE("chain evaluation refuses real games") {
    CHECK_THROWS_AS(mc_reach_prob(builtin_game("fig1")), ValidationError);
}

TEST_CASE("exact values of the fixture games") {
    ExactVector fig1 = solve_exact(builtin_game("fig1"));
    CHECK(fig1[0] == Rational(1, 2));
    CHECK(fig1[1] == Rational(1, 2));
    CHECK(fig1[2] == Rational(1));
    CHECK(fig1[3] == Rational(0));

    CHECK(solve_exact(builtin_game("fig2-mdp"))[0] == Rational(1, 2));
    CHECK(solve_exact(builtin_game("fig2-collapsed"))[0] == Rational(1, 2));

    ExactVector fig3 = solve_exact(builtin_game("fig3"));
    CHECK(fig3[0] == Rational(3, 10));
    CHECK(fig3[1] == Rational(3, 10));
    CHECK(fig3[2] == Rational(3, 5));

    // With a worthless and a sure exit the Minimizer just never leaves the cycle.
    ExactVector degenerate = solve_exact(builtin_game("fig3", {Rational(0), Rational(1)}));
    CHECK(degenerate[0] == Rational(0));
    CHECK(degenerate[1] == Rational(0));
    CHECK(degenerate[2] == Rational(1));

    ExactVector fig6 = solve_exact(builtin_game("fig6"));
    CHECK(fig6[0] == Rational(43, 70));
    CHECK(fig6[1] == Rational(3, 7));
    CHECK(fig6[2] == Rational(39, 70));
    CHECK(fig6[3] == Rational(39, 70));

    ExactVector trap = solve_exact(builtin_game("vi-trap", {Rational(4)}));
    for (int s = 0; s < 4; ++s) CHECK(trap[s] == Rational(1, 2));

    ExactVector skewed = solve_exact(builtin_game("skewed", {Rational(5)}));
    CHECK(skewed[0] == Rational(0));
    CHECK(skewed[1] == Rational(1));
}

TEST_CASE("strategy pair counting") {
    CHECK(strategy_pair_count(builtin_game("fig1")) == 2);
    CHECK(strategy_pair_count(builtin_game("fig3")) == 8);
    CHECK(strategy_pair_count(builtin_game("vi-trap", {Rational(10)})) == 1);
    CHECK(strategy_pair_count(wide_game(10)) == 1024);
    CHECK(strategy_pair_count(wide_game(70)) == UINT64_MAX);  // saturated
}

TEST_CASE("enumeration refuses oversized requests with the required count") {
    try {
        solve_exact(builtin_game("fig3"), 4);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.required_pairs() == 8.0);
    }
    CHECK(solve_exact(builtin_game("fig3"), 8)[0] == Rational(3, 10));
}

TEST_CASE("component certification checks the exit equation") {
    StochasticGame fig3 = builtin_game("fig3");
    ExactVector v3 = solve_exact(fig3);
    CHECK(certify_sec(fig3, StateSet{0, 1}, v3));
    CHECK_FALSE(certify_sec(fig3, StateSet{0, 1, 2}, v3));
    CHECK_FALSE(certify_sec(fig3, StateSet{}, v3));

    StochasticGame fig1 = builtin_game("fig1");
    CHECK(certify_sec(fig1, StateSet{0, 1}, solve_exact(fig1)));

    StochasticGame fig6 = builtin_game("fig6");
    CHECK_FALSE(certify_sec(fig6, StateSet{0, 1, 2, 3}, solve_exact(fig6)));
}

TEST_CASE("bound checking is exact up to the stated slack") {
    StochasticGame g = builtin_game("fig1");
    ExactVector v = solve_exact(g);
    Bounds b;
    b.lower = ValueVector{0.5, 0.5, 1.0, 0.0};
    b.upper = b.lower;
    b.improving.assign(4, -1);
    CHECK(check_bounds(g, b, v, 1e-9).empty());

    b.lower[0] = 0.5 + 5e-10;  // inside the slack
    CHECK(check_bounds(g, b, v, 1e-9).empty());

    b.lower[0] = 0.5 + 2e-9;
    auto low = check_bounds(g, b, v, 1e-9);
    REQUIRE(low.size() == 1);
    CHECK(low[0].state == 0);
    CHECK(low[0].lower_side);
    CHECK(low[0].bound == 0.5 + 2e-9);

    b.lower[0] = 0.5;
    b.upper[1] = 0.5 - 2e-9;
    auto high = check_bounds(g, b, v, 1e-9);
    REQUIRE(high.size() == 1);
    CHECK(high[0].state == 1);
    CHECK_FALSE(high[0].lower_side);
}

TEST_CASE("fixing a strategy prunes exactly that player's choices") {
    StochasticGame g = builtin_game("fig1");
    Strategy keep_lottery{Player::maximizer, {-1, 1, 0, 0}};
    StochasticGame played = apply_strategy(g, keep_lottery);
    CHECK(validate_game(played).ok());
    CHECK(played.actions(1).size() == 1);
    CHECK(played.actions(1)[0].label == "c");
    CHECK(played.actions(0).size() == 1);  // the Minimizer keeps its only action
    CHECK(solve_exact(played)[0] == Rational(1, 2));

    Strategy keep_return{Player::maximizer, {-1, 0, 0, 0}};
    CHECK(solve_exact(apply_strategy(g, keep_return))[0] == Rational(0));

    Strategy missing{Player::maximizer, {-1, -1, 0, 0}};
    CHECK_THROWS_AS(apply_strategy(g, missing), std::invalid_argument);
    Strategy out_of_range{Player::maximizer, {-1, 5, 0, 0}};
    CHECK_THROWS_AS(apply_strategy(g, out_of_range), std::invalid_argument);
}

TEST_CASE("exact values satisfy their own one-step equations") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        GeneratorParams params;
        params.seed = seed;
        StochasticGame g = random_game(params);
        ExactVector v = solve_exact(g);
        CHECK(v[g.target()] == 1);
        CHECK(v[g.sink()] == 0);
        for (StateId s = 0; s < g.state_count(); ++s) {
            Rational best = action_value_exact(g, v, s, 0);
            for (std::uint32_t a = 1; a < g.actions(s).size(); ++a) {
                Rational value = action_value_exact(g, v, s, a);
                if (g.owner(s) == Player::maximizer ? value > best : value < best)
                    best = value;
            }
            CHECK_MESSAGE(v[s] == best, "seed ", seed, " state ", s);
        }
    }
}

TEST_CASE("the order of play does not matter") {
    // Enumerating the Minimizer outside and taking best replies from the full
    // Maximizer side lands on the same vector, as determinacy promises.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorParams params;
        params.seed = seed;
        params.state_count = 5;
        StochasticGame g = random_game(params);
        ExactVector v = solve_exact(g);

        std::vector<StateId> min_states;
        for (StateId s = 0; s < g.state_count(); ++s)
            if (!g.is_terminal(s) && g.owner(s) == Player::minimizer)
                min_states.push_back(s);

        ExactVector swapped(g.state_count(), Rational(1));
        swapped[g.sink()] = 0;
        std::vector<std::int32_t> choice(g.state_count(), 0);
        bool more = true;
        while (more) {
            Strategy sigma{Player::minimizer, choice};
            for (StateId s = 0; s < g.state_count(); ++s)
                if (std::find(min_states.begin(), min_states.end(), s) == min_states.end())
                    sigma.choice[s] = -1;
            ExactVector reply = solve_exact(apply_strategy(g, sigma));
            for (StateId s = 0; s < g.state_count(); ++s)
                if (reply[s] < swapped[s]) swapped[s] = reply[s];

            more = false;
            for (StateId s : min_states) {
                if (++choice[s] < static_cast<std::int32_t>(g.actions(s).size())) {
                    more = true;
                    break;
                }
                choice[s] = 0;
            }
        }
        for (StateId s = 0; s < g.state_count(); ++s)
            CHECK_MESSAGE(swapped[s] == v[s], "seed ", seed, " state ", s);
    }
}

TEST_CASE("certified components found by search match subset enumeration") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        GeneratorParams params;
        params.seed = 400 + seed;
        params.state_count = 5;
        StochasticGame g = random_game(params);
        ExactVector v = solve_exact(g);
        for (const StateSet& t : sgtest::brute_msecs(g, v))
            CHECK_MESSAGE(certify_sec(g, t, v), "seed ", 400 + seed);
    }
}
