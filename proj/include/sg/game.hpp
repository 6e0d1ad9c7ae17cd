#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sg/rational.hpp"

namespace sg {

enum class Player { maximizer, minimizer };

using StateId = std::uint32_t;

/// Sorted, duplicate-free list of state indices.
using StateSet = std::vector<StateId>;

/// State values in [0,1], indexed by StateId. Iterative solvers work in binary64;
/// the oracle keeps an ExactVector instead.
using ValueVector = std::vector<double>;

struct Branch {
    StateId target;
    Rational prob;
    double prob_f;  // rational_to_double(prob), cached once at construction
};

struct Action {
    std::string label;
    std::vector<Branch> branches;
};

/// A turn-based stochastic game with a reachability objective. Immutable once built;
/// concurrent readers need no synchronization. States carry dense indices in declaration
/// order; names exist only for the file format and diagnostics.
class StochasticGame {
public:
    StochasticGame(std::vector<std::string> names, std::vector<Player> owners,
                   std::vector<std::vector<Action>> actions, StateId initial, StateId target,
                   StateId sink);

    std::size_t state_count() const { return names_.size(); }
    const std::string& name(StateId s) const { return names_[s]; }
    Player owner(StateId s) const { return owners_[s]; }
    const std::vector<Action>& actions(StateId s) const { return actions_[s]; }

    StateId initial() const { return initial_; }
    StateId target() const { return target_; }
    StateId sink() const { return sink_; }

    /// Target or sink; these are absorbing and their values are pinned to 1 and 0.
    bool is_terminal(StateId s) const { return s == target_ || s == sink_; }

    std::optional<StateId> state_index(std::string_view name) const;
    std::optional<std::uint32_t> action_index(StateId s, std::string_view label) const;

    std::size_t total_action_count() const;

    /// Same states, owners, designations, labels and exact distributions, in the same order.
    bool structurally_equal(const StochasticGame& other) const;

private:
    std::vector<std::string> names_;
    std::vector<Player> owners_;
    std::vector<std::vector<Action>> actions_;
    StateId initial_;
    StateId target_;
    StateId sink_;
    std::unordered_map<std::string, StateId> index_;
};

/// Incremental construction helper used by the parser, the builtin fixtures and the
/// generator. build() synthesizes a `loop` self-loop on target/sink when they have no
/// actions; everything else is taken as given (validate_game reports the rest).
class GameBuilder {
public:
    /// Declaration order defines the index. Duplicate names are rejected here because
    /// nothing downstream could refer to the second state.
    StateId add_state(std::string name, Player owner);

    void add_action(StateId s, std::string label);

    /// Appends to the most recently added action of s.
    void add_branch(StateId s, StateId to, Rational prob);

    void set_initial(StateId s) { initial_ = s; }
    void set_target(StateId s) { target_ = s; }
    void set_sink(StateId s) { sink_ = s; }

    std::optional<StateId> state_index(std::string_view name) const;

    StochasticGame build();

private:
    std::vector<std::string> names_;
    std::vector<Player> owners_;
    std::vector<std::vector<Action>> actions_;
    std::optional<StateId> initial_, target_, sink_;
    std::unordered_map<std::string, StateId> index_;
};

struct Violation {
    std::string where;    // "state q", "q/c", ...
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks every structural invariant: distributions sum to exactly 1 with positive
/// entries, no state without actions, unique labels per state, target/sink absorbing
/// with a single self-loop, designations distinct and in range. Violations come back
/// as data; nothing throws.
ValidationReport validate_game(const StochasticGame& game);

/// Merges every state from which the target is graph-unreachable into the sink and
/// redirects the incoming probability mass accordingly (coalesced into one branch).
/// If the initial state is merged, the result starts at the sink. Idempotent; requires
/// a game that passes validate_game.
StochasticGame preprocess_merge_unreachable(const StochasticGame& game);

/// Weighted sum of f over the successors of (s,a), accumulated in branch order.
double action_value(const StochasticGame& game, const ValueVector& f, StateId s,
                    std::uint32_t a);

/// Exact-arithmetic counterpart used by the oracle-side checks.
Rational action_value_exact(const StochasticGame& game, const ExactVector& f, StateId s,
                            std::uint32_t a);

/// Deterministic memoryless strategy for one player. `choice[s]` is an index into
/// actions(s) on that player's states and -1 elsewhere.
struct Strategy {
    Player player;
    std::vector<std::int32_t> choice;
};

}  // namespace sg
