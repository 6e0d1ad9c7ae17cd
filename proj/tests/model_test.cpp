#include <doctest.h>

#include <stdexcept>

#include "sg/errors.hpp"
#include "sg/format.hpp"
#include "sg/game.hpp"

using namespace sg;

namespace {

// p (min) --a--> {one: 1/2, zero: 1/2}
StochasticGame tiny_game() {
    GameBuilder b;
    StateId p = b.add_state("p", Player::minimizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, one, Rational(1, 2));
    b.add_branch(p, zero, Rational(1, 2));
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

}  // namespace

TEST_CASE("builder produces the declared structure") {
    StochasticGame g = tiny_game();
    CHECK(g.state_count() == 3);
    CHECK(g.name(0) == "p");
    CHECK(g.owner(0) == Player::minimizer);
    CHECK(g.owner(1) == Player::maximizer);
    CHECK(g.initial() == 0);
    CHECK(g.target() == 1);
    CHECK(g.sink() == 2);
    CHECK(g.is_terminal(1));
    CHECK(g.is_terminal(2));
    CHECK_FALSE(g.is_terminal(0));
    CHECK(*g.state_index("zero") == 2);
    CHECK_FALSE(g.state_index("nope"));
    CHECK(*g.action_index(0, "a") == 0);
    CHECK_FALSE(g.action_index(0, "b"));
    CHECK(g.total_action_count() == 3);  // a plus two synthesized loops
    CHECK(validate_game(g).ok());
}

TEST_CASE("terminal self-loops are synthesized") {
    StochasticGame g = tiny_game();
    for (StateId s : {g.target(), g.sink()}) {
        REQUIRE(g.actions(s).size() == 1);
        CHECK(g.actions(s)[0].label == "loop");
        REQUIRE(g.actions(s)[0].branches.size() == 1);
        CHECK(g.actions(s)[0].branches[0].target == s);
        CHECK(g.actions(s)[0].branches[0].prob == 1);
    }
}

TEST_CASE("builder rejects misuse") {
    GameBuilder b;
    b.add_state("p", Player::maximizer);
    CHECK_THROWS_AS(b.add_state("p", Player::minimizer), std::invalid_argument);
    CHECK_THROWS_AS(b.add_branch(0, 0, Rational(1)), std::invalid_argument);  // no action yet
    CHECK_THROWS_AS(b.build(), std::invalid_argument);  // designations not set
}

TEST_CASE("validate flags each structural defect") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId q = b.add_state("q", Player::minimizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, q, Rational(1, 2));  // sums to 1/2
    b.add_action(p, "a");                // duplicate label
    b.add_branch(p, one, Rational(1));
    // q has no actions at all.
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    StochasticGame g = b.build();
    ValidationReport r = validate_game(g);
    REQUIRE_FALSE(r.ok());

    auto has = [&](const std::string& where, const std::string& fragment) {
        for (const Violation& v : r.violations)
            if (v.where == where && v.message.find(fragment) != std::string::npos) return true;
        return false;
    };
    CHECK(has("p/a", "duplicate action label"));
    CHECK(has("p/a", "sums to 1/2"));
    CHECK(has("state q", "no available actions"));
    CHECK(r.to_string().find("duplicate action label") != std::string::npos);
}

TEST_CASE("validate requires absorbing designated states") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, one, Rational(1));
    b.add_action(one, "escape");  // target with a non-loop action
    b.add_branch(one, zero, Rational(1));
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    StochasticGame g = b.build();
    ValidationReport r = validate_game(g);
    bool flagged = false;
    for (const Violation& v : r.violations)
        if (v.where == "state one" && v.message.find("self-loop") != std::string::npos)
            flagged = true;
    CHECK(flagged);
}

TEST_CASE("validate flags coinciding target and sink") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId t = b.add_state("t", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, t, Rational(1));
    b.set_initial(p);
    b.set_target(t);
    b.set_sink(t);
    ValidationReport r = validate_game(b.build());
    bool flagged = false;
    for (const Violation& v : r.violations)
        if (v.message.find("same state") != std::string::npos) flagged = true;
    CHECK(flagged);
}

TEST_CASE("structural equality is exact") {
    StochasticGame a = builtin_game("fig1");
    StochasticGame b = builtin_game("fig1");
    CHECK(a.structurally_equal(b));
    CHECK(b.structurally_equal(a));
    CHECK_FALSE(a.structurally_equal(builtin_game("fig2-mdp")));
    CHECK_FALSE(a.structurally_equal(builtin_game("fig6")));
}

TEST_CASE("action values accumulate in branch order") {
    StochasticGame g = tiny_game();
    ValueVector f{0.0, 1.0, 0.0};
    CHECK(action_value(g, f, 0, 0) == 0.5);
    ExactVector fe{Rational(0), Rational(1), Rational(0)};
    CHECK(action_value_exact(g, fe, 0, 0) == Rational(1, 2));

    ValueVector h{0.0, 0.25, 0.75};
    CHECK(action_value(g, h, 0, 0) == 0.5 * 0.25 + 0.5 * 0.75);
}

TEST_CASE("preprocess merges target-unreachable states into the sink") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId d = b.add_state("dead", Player::minimizer);  // only path: dead -> dead2 -> dead
    StateId d2 = b.add_state("dead2", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, one, Rational(1, 4));
    b.add_branch(p, d, Rational(1, 4));
    b.add_branch(p, d2, Rational(1, 4));
    b.add_branch(p, zero, Rational(1, 4));
    b.add_action(d, "x");
    b.add_branch(d, d2, Rational(1));
    b.add_action(d2, "y");
    b.add_branch(d2, d, Rational(1));
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    StochasticGame g = b.build();

    StochasticGame m = preprocess_merge_unreachable(g);
    CHECK(m.state_count() == 3);  // p, one, zero
    CHECK(validate_game(m).ok());
    REQUIRE(m.state_index("p"));
    CHECK_FALSE(m.state_index("dead"));
    CHECK_FALSE(m.state_index("dead2"));

    // The two dead branches and the original sink branch coalesce into a single 3/4
    // branch at the position of the first of them.
    const Action& act = m.actions(*m.state_index("p"))[0];
    REQUIRE(act.branches.size() == 2);
    CHECK(act.branches[0].target == *m.state_index("one"));
    CHECK(act.branches[0].prob == Rational(1, 4));
    CHECK(act.branches[1].target == m.sink());
    CHECK(act.branches[1].prob == Rational(3, 4));
}

TEST_CASE("preprocess relocates an initial state that cannot reach the target") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId q = b.add_state("q", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, p, Rational(1));  // initial is absorbing, never reaches the target
    b.add_action(q, "b");
    b.add_branch(q, one, Rational(1));
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    StochasticGame m = preprocess_merge_unreachable(b.build());
    CHECK(m.initial() == m.sink());
    CHECK(validate_game(m).ok());
}

TEST_CASE("preprocess is the identity on already clean games") {
    for (const char* name : {"fig1", "fig2-mdp", "fig6"}) {
        StochasticGame g = builtin_game(name);
        StochasticGame once = preprocess_merge_unreachable(g);
        CHECK(once.structurally_equal(g));
        CHECK(preprocess_merge_unreachable(once).structurally_equal(once));
    }
}

TEST_CASE("preprocess rejects invalid games") {
    GameBuilder b;
    StateId p = b.add_state("p", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(p, "a");
    b.add_branch(p, one, Rational(1, 3));  // does not sum to 1
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    CHECK_THROWS_AS(preprocess_merge_unreachable(b.build()), ValidationError);
}
