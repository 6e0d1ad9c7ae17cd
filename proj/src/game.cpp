#include "sg/game.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "sg/errors.hpp"

namespace sg {

StochasticGame::StochasticGame(std::vector<std::string> names, std::vector<Player> owners,
                               std::vector<std::vector<Action>> actions, StateId initial,
                               StateId target, StateId sink)
    : names_(std::move(names)),
      owners_(std::move(owners)),
      actions_(std::move(actions)),
      initial_(initial),
      target_(target),
      sink_(sink) {
    if (owners_.size() != names_.size() || actions_.size() != names_.size())
        throw std::invalid_argument("StochasticGame: state vectors disagree in length");
    if (initial_ >= names_.size() || target_ >= names_.size() || sink_ >= names_.size())
        throw std::invalid_argument("StochasticGame: designated state out of range");
    index_.reserve(names_.size());
    for (StateId s = 0; s < names_.size(); ++s) index_.emplace(names_[s], s);
}

std::optional<StateId> StochasticGame::state_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> StochasticGame::action_index(StateId s,
                                                          std::string_view label) const {
    const auto& acts = actions_[s];
    for (std::uint32_t a = 0; a < acts.size(); ++a)
        if (acts[a].label == label) return a;
    return std::nullopt;
}

std::size_t StochasticGame::total_action_count() const {
    std::size_t n = 0;
    for (const auto& acts : actions_) n += acts.size();
    return n;
}

bool StochasticGame::structurally_equal(const StochasticGame& other) const {
    if (names_ != other.names_ || owners_ != other.owners_) return false;
    if (initial_ != other.initial_ || target_ != other.target_ || sink_ != other.sink_)
        return false;
    if (actions_.size() != other.actions_.size()) return false;
    for (StateId s = 0; s < actions_.size(); ++s) {
        const auto& mine = actions_[s];
        const auto& theirs = other.actions_[s];
        if (mine.size() != theirs.size()) return false;
        for (std::size_t a = 0; a < mine.size(); ++a) {
            if (mine[a].label != theirs[a].label) return false;
            if (mine[a].branches.size() != theirs[a].branches.size()) return false;
            for (std::size_t i = 0; i < mine[a].branches.size(); ++i) {
                const Branch& x = mine[a].branches[i];
                const Branch& y = theirs[a].branches[i];
                if (x.target != y.target || x.prob != y.prob) return false;
            }
        }
    }
    return true;
}

StateId GameBuilder::add_state(std::string name, Player owner) {
    if (index_.count(name))
        throw std::invalid_argument("GameBuilder: duplicate state name '" + name + "'");
    StateId s = static_cast<StateId>(names_.size());
    index_.emplace(name, s);
    names_.push_back(std::move(name));
    owners_.push_back(owner);
    actions_.emplace_back();
    return s;
}

void GameBuilder::add_action(StateId s, std::string label) {
    actions_.at(s).push_back(Action{std::move(label), {}});
}

void GameBuilder::add_branch(StateId s, StateId to, Rational prob) {
    auto& acts = actions_.at(s);
    if (acts.empty())
        throw std::invalid_argument("GameBuilder: branch before any action at state " +
                                    names_.at(s));
    acts.back().branches.push_back(Branch{to, prob, rational_to_double(prob)});
}

std::optional<StateId> GameBuilder::state_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

StochasticGame GameBuilder::build() {
    if (!initial_ || !target_ || !sink_)
        throw std::invalid_argument("GameBuilder: initial, target and sink must be set");
    for (StateId s : {*target_, *sink_}) {
        if (actions_[s].empty()) {
            actions_[s].push_back(
                Action{"loop", {Branch{s, Rational(1), 1.0}}});
        }
    }
    return StochasticGame(std::move(names_), std::move(owners_), std::move(actions_),
                          *initial_, *target_, *sink_);
}

ValidationReport validate_game(const StochasticGame& game) {
    ValidationReport report;
    auto add = [&](std::string where, std::string message) {
        report.violations.push_back({std::move(where), std::move(message)});
    };

    const std::size_t n = game.state_count();
    if (game.target() == game.sink()) add("game", "target and sink are the same state");

    for (StateId s = 0; s < n; ++s) {
        const auto& acts = game.actions(s);
        const std::string& name = game.name(s);
        if (acts.empty()) add("state " + name, "no available actions");
        for (std::size_t a = 0; a < acts.size(); ++a) {
            const Action& act = acts[a];
            for (std::size_t b = a + 1; b < acts.size(); ++b)
                if (acts[b].label == act.label)
                    add(name + "/" + act.label, "duplicate action label");
            if (act.branches.empty()) {
                add(name + "/" + act.label, "empty distribution");
                continue;
            }
            Rational sum(0);
            for (const Branch& br : act.branches) {
                if (br.target >= n) {
                    add(name + "/" + act.label, "branch to out-of-range state");
                    continue;
                }
                if (br.prob <= 0)
                    add(name + "/" + act.label, "non-positive branch probability");
                sum += br.prob;
            }
            if (sum != 1)
                add(name + "/" + act.label,
                    "distribution sums to " + rational_to_string(sum) + ", not 1");
        }
    }

    for (StateId s : {game.target(), game.sink()}) {
        const auto& acts = game.actions(s);
        const bool absorbing = acts.size() == 1 && acts[0].branches.size() == 1 &&
                               acts[0].branches[0].target == s &&
                               acts[0].branches[0].prob == 1;
        if (!absorbing)
            add("state " + game.name(s),
                s == game.target() ? "target must have exactly one self-loop action"
                                   : "sink must have exactly one self-loop action");
    }

    return report;
}

std::string ValidationReport::to_string() const {
    std::string out;
    for (const Violation& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.where + ": " + v.message;
    }
    return out;
}

StochasticGame preprocess_merge_unreachable(const StochasticGame& game) {
    {
        ValidationReport report = validate_game(game);
        if (!report.ok())
            throw ValidationError("preprocess_merge_unreachable: " + report.to_string());
    }

    const std::size_t n = game.state_count();

    // Backward reachability to the target over positive-probability edges.
    std::vector<std::vector<StateId>> pred(n);
    for (StateId s = 0; s < n; ++s)
        for (const Action& act : game.actions(s))
            for (const Branch& br : act.branches) pred[br.target].push_back(s);
    std::vector<char> reaches(n, 0);
    std::deque<StateId> queue{game.target()};
    reaches[game.target()] = 1;
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (StateId p : pred[s])
            if (!reaches[p]) {
                reaches[p] = 1;
                queue.push_back(p);
            }
    }

    std::vector<StateId> remap(n);
    GameBuilder builder;
    for (StateId s = 0; s < n; ++s) {
        if (reaches[s] || s == game.sink())
            remap[s] = builder.add_state(game.name(s), game.owner(s));
    }
    for (StateId s = 0; s < n; ++s) {
        if (!reaches[s]) remap[s] = remap[game.sink()];
    }

    const StateId new_sink = remap[game.sink()];
    for (StateId s = 0; s < n; ++s) {
        if (!reaches[s] || game.is_terminal(s)) continue;  // terminal loops re-synthesized
        for (const Action& act : game.actions(s)) {
            builder.add_action(remap[s], act.label);
            // All mass bound for merged states lands on the sink; coalesce it (and any
            // pre-existing sink branch) into one entry at the first such position.
            Rational to_sink(0);
            std::vector<std::pair<StateId, Rational>> kept;
            bool sink_seen = false;
            std::size_t sink_pos = 0;
            for (const Branch& br : act.branches) {
                StateId t = remap[br.target];
                if (t == new_sink) {
                    if (!sink_seen) {
                        sink_seen = true;
                        sink_pos = kept.size();
                        kept.emplace_back(new_sink, Rational(0));
                    }
                    to_sink += br.prob;
                } else {
                    kept.emplace_back(t, br.prob);
                }
            }
            if (sink_seen) kept[sink_pos].second = to_sink;
            for (auto& [t, p] : kept) builder.add_branch(remap[s], t, p);
        }
    }

    builder.set_initial(remap[game.initial()]);
    builder.set_target(remap[game.target()]);
    builder.set_sink(new_sink);
    return builder.build();
}

double action_value(const StochasticGame& game, const ValueVector& f, StateId s,
                    std::uint32_t a) {
    double v = 0;
    for (const Branch& br : game.actions(s)[a].branches) v += br.prob_f * f[br.target];
    return v;
}

Rational action_value_exact(const StochasticGame& game, const ExactVector& f, StateId s,
                            std::uint32_t a) {
    Rational v(0);
    for (const Branch& br : game.actions(s)[a].branches) v += br.prob * f[br.target];
    return v;
}

}  // namespace sg
