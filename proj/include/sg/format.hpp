#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sg/game.hpp"

namespace sg {

/// Parses the `sg v1` model format and validates the result. Throws ParseError with a
/// 1-based line number on malformed text and ValidationError when the parsed game breaks
/// a structural invariant. Does not preprocess; callers that solve do that themselves.
///
/// Format, line by line ('#' starts a comment, blank lines ignored, LF or CRLF):
///   sg v1
///   state <name> <max|min>     declaration order defines the index order
///   init <name>
///   target <name>
///   sink <name>
///   act <state> <label>
///     -> <state> <prob>        prob = "a/b" or a decimal with <= 18 fractional digits
/// Target and sink must not declare act blocks; their self-loops are synthesized.
StochasticGame parse_model(const std::string& text);

/// Canonical serialization: states in index order, then init/target/sink, then act
/// blocks in state and action order with two-space indented branches, probabilities in
/// canonical rational form, LF line endings. parse_model(serialize_model(g)) is
/// structurally equal to g for every valid game.
std::string serialize_model(const StochasticGame& game);

/// Fixture games. Parameter arity is checked: fig3 takes (alpha, beta) in [0,1],
/// skewed and vi-trap take a positive integer chain length. Unknown name or bad
/// parameters throw UnknownBuiltin.
///   fig1            4-state game, value 1/2 at both non-terminal states
///   fig2-mdp        2-state Maximizer cycle with a probabilistic exit
///   fig2-collapsed  the same game with the cycle merged into one state
///   fig3(a,b)       Minimizer/Maximizer cycle with exits worth a and b
///   fig6            4-state alternating cycle with half-step exits
///   skewed(N)       Minimizer start: direct sink exit vs an N-state chain to target
///   vi-trap(n)      n-state restart chain; value 1/2, hostile to plain value iteration
StochasticGame builtin_game(const std::string& name, const std::vector<Rational>& params = {});

/// Splits "fig3(3/10,6/10)" into name and parameters. Plain names get no parameters.
/// Throws UnknownBuiltin on unbalanced or empty parameter syntax (name itself is not
/// checked here).
std::pair<std::string, std::vector<Rational>> parse_builtin_spec(const std::string& spec);

struct GeneratorParams {
    std::uint32_t state_count = 6;       // includes target and sink; >= 3
    std::uint32_t max_actions = 3;       // per non-terminal state, >= 1
    std::uint32_t max_branching = 3;     // successors per action, >= 1
    double minimizer_fraction = 0.5;     // probability a non-terminal state is Minimizer's
    std::vector<Rational> probability_pool = {
        {1, 4}, {1, 3}, {1, 2}, {2, 3}, {3, 4}, {1, 1}};
    std::uint64_t seed = 1;
};

/// Seeded random game. Deterministic in every field of params and in nothing else:
/// the same params always produce a structurally identical game. Branch weights are
/// drawn from the pool and renormalized, so each distribution sums to exactly 1.
/// The target is kept graph-reachable from the initial state (one repair action at
/// the initial state when needed); the result passes validate_game but is not
/// preprocessed.
StochasticGame random_game(const GeneratorParams& params);

}  // namespace sg
