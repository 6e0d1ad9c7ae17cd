#include "sg/format.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

#include "sg/errors.hpp"

namespace sg {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

struct Parser {
    GameBuilder builder;
    std::size_t line_no = 0;
    bool saw_header = false;
    // State whose act block is open, and whether the current action has a branch yet.
    std::optional<StateId> open_state;
    bool open_action_has_branch = false;
    bool saw_init = false;
    std::optional<std::string> target_name, sink_name;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(line_no, message);
    }

    StateId resolve(const std::string& name) const {
        auto s = builder.state_index(name);
        if (!s) throw ParseError(line_no, "unknown state '" + name + "'");
        return *s;
    }

    void close_block() {
        if (open_state && !open_action_has_branch) fail("action without branches");
        open_state.reset();
    }

    void feed(const std::string& raw) {
        ++line_no;
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        auto tokens = split_tokens(line);
        if (tokens.empty()) return;

        if (!saw_header) {
            if (tokens.size() != 2 || tokens[0] != "sg" || tokens[1] != "v1")
                fail("expected header 'sg v1'");
            saw_header = true;
            return;
        }

        const std::string& kw = tokens[0];
        if (kw == "->") {
            if (!open_state) fail("branch outside an act block");
            if (tokens.size() != 3) fail("expected '-> <state> <prob>'");
            auto prob = parse_rational(tokens[2]);
            if (!prob) fail("bad probability '" + tokens[2] + "'");
            builder.add_branch(*open_state, resolve(tokens[1]), *prob);
            open_action_has_branch = true;
            return;
        }

        close_block();
        if (kw == "state") {
            if (tokens.size() != 3) fail("expected 'state <name> <max|min>'");
            Player owner;
            if (tokens[2] == "max")
                owner = Player::maximizer;
            else if (tokens[2] == "min")
                owner = Player::minimizer;
            else
                fail("owner must be 'max' or 'min'");
            if (builder.state_index(tokens[1])) fail("state '" + tokens[1] + "' redeclared");
            builder.add_state(tokens[1], owner);
        } else if (kw == "init" || kw == "target" || kw == "sink") {
            if (tokens.size() != 2) fail("expected '" + kw + " <name>'");
            StateId s = resolve(tokens[1]);
            if (kw == "init") {
                if (saw_init) fail("init declared twice");
                saw_init = true;
                builder.set_initial(s);
            } else if (kw == "target") {
                if (target_name) fail("target declared twice");
                target_name = tokens[1];
                builder.set_target(s);
            } else {
                if (sink_name) fail("sink declared twice");
                sink_name = tokens[1];
                builder.set_sink(s);
            }
        } else if (kw == "act") {
            if (tokens.size() != 3) fail("expected 'act <state> <label>'");
            StateId s = resolve(tokens[1]);
            if ((target_name && tokens[1] == *target_name) ||
                (sink_name && tokens[1] == *sink_name))
                fail("target and sink may not declare actions");
            builder.add_action(s, tokens[2]);
            open_state = s;
            open_action_has_branch = false;
        } else {
            fail("unknown keyword '" + kw + "'");
        }
    }
};

}  // namespace

StochasticGame parse_model(const std::string& text) {
    Parser parser;
    std::string line;
    std::istringstream in(text);
    while (std::getline(in, line)) parser.feed(line);
    ++parser.line_no;
    if (!parser.saw_header) parser.fail("empty model: expected header 'sg v1'");
    parser.close_block();
    if (!parser.target_name) parser.fail("missing target declaration");
    if (!parser.sink_name) parser.fail("missing sink declaration");

    StochasticGame game = [&] {
        try {
            return parser.builder.build();
        } catch (const std::invalid_argument& e) {
            parser.fail(e.what());  // missing init/target/sink
        }
    }();

    // Act blocks on target/sink are already rejected above, so any remaining violation
    // is a genuine model problem, e.g. a distribution that does not sum to 1.
    ValidationReport report = validate_game(game);
    if (!report.ok()) throw ValidationError(report.to_string());
    return game;
}

std::string serialize_model(const StochasticGame& game) {
    std::string out = "sg v1\n";
    for (StateId s = 0; s < game.state_count(); ++s) {
        out += "state " + game.name(s) +
               (game.owner(s) == Player::maximizer ? " max\n" : " min\n");
    }
    out += "init " + game.name(game.initial()) + "\n";
    out += "target " + game.name(game.target()) + "\n";
    out += "sink " + game.name(game.sink()) + "\n";
    for (StateId s = 0; s < game.state_count(); ++s) {
        if (game.is_terminal(s)) continue;  // synthesized again on parse
        for (const Action& act : game.actions(s)) {
            out += "act " + game.name(s) + " " + act.label + "\n";
            for (const Branch& br : act.branches)
                out += "  -> " + game.name(br.target) + " " + rational_to_string(br.prob) +
                       "\n";
        }
    }
    return out;
}

namespace {

StochasticGame make_fig1() {
    GameBuilder b;
    StateId p = b.add_state("p", Player::minimizer);
    StateId q = b.add_state("q", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    b.add_action(p, "a");
    b.add_branch(p, q, Rational(1));
    b.add_action(q, "b");
    b.add_branch(q, p, Rational(1));
    b.add_action(q, "c");
    b.add_branch(q, q, {1, 3});
    b.add_branch(q, one, {1, 3});
    b.add_branch(q, zero, {1, 3});
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

StochasticGame make_fig2_mdp() {
    GameBuilder b;
    StateId s = b.add_state("s", Player::maximizer);
    StateId t = b.add_state("t", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(s, "a");
    b.add_branch(s, t, Rational(1));
    b.add_action(t, "b");
    b.add_branch(t, s, Rational(1));
    b.add_action(t, "c");
    b.add_branch(t, t, {1, 3});
    b.add_branch(t, one, {1, 3});
    b.add_branch(t, zero, {1, 3});
    b.set_initial(s);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

StochasticGame make_fig2_collapsed() {
    GameBuilder b;
    StateId st = b.add_state("st", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::maximizer);
    b.add_action(st, "c");
    b.add_branch(st, st, {1, 3});
    b.add_branch(st, one, {1, 3});
    b.add_branch(st, zero, {1, 3});
    b.set_initial(st);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

// Adds a two-way lottery branch worth `value`: value to target, the rest to sink.
void add_lottery(GameBuilder& b, StateId s, StateId one, StateId zero, const Rational& value,
                 const Rational& scale) {
    if (value > 0) b.add_branch(s, one, value * scale);
    if (value < 1) b.add_branch(s, zero, (Rational(1) - value) * scale);
}

StochasticGame make_fig3(const Rational& alpha, const Rational& beta) {
    GameBuilder b;
    StateId p = b.add_state("p", Player::minimizer);
    StateId q = b.add_state("q", Player::maximizer);
    StateId r = b.add_state("r", Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    b.add_action(p, "a");
    b.add_branch(p, q, Rational(1));
    b.add_action(p, "c");
    b.add_branch(p, r, Rational(1));
    b.add_action(q, "b");
    b.add_branch(q, p, Rational(1));
    b.add_action(q, "e");
    add_lottery(b, q, one, zero, alpha, Rational(1));
    b.add_action(r, "d");
    b.add_branch(r, p, Rational(1));
    b.add_action(r, "f");
    add_lottery(b, r, one, zero, beta, Rational(1));
    b.set_initial(p);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

StochasticGame make_fig6() {
    GameBuilder b;
    StateId A = b.add_state("A", Player::maximizer);
    StateId B = b.add_state("B", Player::minimizer);
    StateId C = b.add_state("C", Player::maximizer);
    StateId D = b.add_state("D", Player::minimizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    const StateId cycle[4] = {A, B, C, D};
    const Rational exit_value[4] = {{4, 5}, {3, 10}, {2, 5}, {1, 2}};
    for (int i = 0; i < 4; ++i) {
        StateId s = cycle[i];
        StateId next = cycle[(i + 1) % 4];
        b.add_action(s, "go");
        b.add_branch(s, next, Rational(1));
        // Leaving action: half continues the cycle, half resolves to the exit value.
        b.add_action(s, "out");
        add_lottery(b, s, one, zero, exit_value[i], {1, 2});
        b.add_branch(s, next, {1, 2});
    }
    b.set_initial(A);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

StochasticGame make_skewed(unsigned long n) {
    GameBuilder b;
    StateId s0 = b.add_state("s0", Player::minimizer);
    std::vector<StateId> chain(n);
    for (unsigned long i = 0; i < n; ++i)
        chain[i] = b.add_state("c" + std::to_string(i + 1), Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    b.add_action(s0, "end");
    b.add_branch(s0, zero, Rational(1));
    b.add_action(s0, "run");
    b.add_branch(s0, chain[0], Rational(1));
    for (unsigned long i = 0; i < n; ++i) {
        b.add_action(chain[i], "next");
        b.add_branch(chain[i], i + 1 < n ? chain[i + 1] : one, Rational(1));
    }
    b.set_initial(s0);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

StochasticGame make_vi_trap(unsigned long n) {
    GameBuilder b;
    std::vector<StateId> s(n);
    for (unsigned long i = 0; i < n; ++i)
        s[i] = b.add_state("s" + std::to_string(i + 1), Player::maximizer);
    StateId one = b.add_state("one", Player::maximizer);
    StateId zero = b.add_state("zero", Player::minimizer);
    for (unsigned long i = 0; i < n; ++i) {
        b.add_action(s[i], "step");
        // Every failure restarts the chain; only the last state settles the outcome.
        if (i + 1 < n) {
            b.add_branch(s[i], s[i + 1], {1, 2});
            b.add_branch(s[i], s[0], {1, 2});
        } else {
            b.add_branch(s[i], one, {1, 2});
            b.add_branch(s[i], zero, {1, 2});
        }
    }
    b.set_initial(s[0]);
    b.set_target(one);
    b.set_sink(zero);
    return b.build();
}

unsigned long integer_param(const std::string& name, const std::vector<Rational>& params,
                            unsigned long min_value) {
    if (params.size() != 1 || params[0].get_den() != 1 || params[0] < min_value ||
        params[0].get_num().fits_ulong_p() == 0)
        throw UnknownBuiltin("builtin_game: " + name + " expects one integer >= " +
                             std::to_string(min_value));
    return params[0].get_num().get_ui();
}

}  // namespace

StochasticGame builtin_game(const std::string& name, const std::vector<Rational>& params) {
    auto no_params = [&] {
        if (!params.empty())
            throw UnknownBuiltin("builtin_game: " + name + " takes no parameters");
    };
    if (name == "fig1") {
        no_params();
        return make_fig1();
    }
    if (name == "fig2-mdp") {
        no_params();
        return make_fig2_mdp();
    }
    if (name == "fig2-collapsed") {
        no_params();
        return make_fig2_collapsed();
    }
    if (name == "fig3") {
        if (params.empty()) return make_fig3({3, 10}, {3, 5});
        if (params.size() != 2 || params[0] < 0 || params[0] > 1 || params[1] < 0 ||
            params[1] > 1)
            throw UnknownBuiltin("builtin_game: fig3 expects (alpha, beta) in [0,1]");
        return make_fig3(params[0], params[1]);
    }
    if (name == "fig6") {
        no_params();
        return make_fig6();
    }
    if (name == "skewed") return make_skewed(integer_param(name, params, 1));
    if (name == "vi-trap") return make_vi_trap(integer_param(name, params, 2));
    throw UnknownBuiltin("builtin_game: unknown name '" + name + "'");
}

std::pair<std::string, std::vector<Rational>> parse_builtin_spec(const std::string& spec) {
    auto open = spec.find('(');
    if (open == std::string::npos) return {spec, {}};
    if (spec.back() != ')' || open + 2 > spec.size() - 1)
        throw UnknownBuiltin("builtin spec: expected 'name(p1,...)' in '" + spec + "'");
    std::string name = spec.substr(0, open);
    std::string inner = spec.substr(open + 1, spec.size() - open - 2);
    std::vector<Rational> params;
    std::size_t pos = 0;
    while (pos <= inner.size()) {
        std::size_t comma = inner.find(',', pos);
        std::string piece =
            inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto value = parse_rational(piece);
        if (!value)
            throw UnknownBuiltin("builtin spec: bad parameter '" + piece + "' in '" + spec +
                                 "'");
        params.push_back(*value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return {std::move(name), std::move(params)};
}

namespace {

// splitmix64; duplicated from the simulation header on purpose: the generator must stay
// byte-stable even if the simulation RNG ever changes.
struct GenRng {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = next();
            if (x >= threshold) return x % n;
        }
    }
};

}  // namespace

StochasticGame random_game(const GeneratorParams& params) {
    if (params.state_count < 3)
        throw std::invalid_argument("random_game: need at least 3 states");
    if (params.max_actions < 1 || params.max_branching < 1)
        throw std::invalid_argument("random_game: need at least one action and branch");
    if (params.probability_pool.empty())
        throw std::invalid_argument("random_game: empty probability pool");

    GenRng rng{params.seed};
    GameBuilder b;
    const std::uint32_t inner = params.state_count - 2;
    std::vector<StateId> states(params.state_count);
    for (std::uint32_t i = 0; i < inner; ++i) {
        Player owner = rng.next_double() < params.minimizer_fraction ? Player::minimizer
                                                                     : Player::maximizer;
        states[i] = b.add_state("s" + std::to_string(i), owner);
    }
    states[inner] = b.add_state("one", Player::maximizer);
    states[inner + 1] = b.add_state("zero", Player::minimizer);

    for (std::uint32_t i = 0; i < inner; ++i) {
        std::uint64_t action_count = 1 + rng.next_below(params.max_actions);
        for (std::uint64_t a = 0; a < action_count; ++a) {
            b.add_action(states[i], "a" + std::to_string(a));
            std::uint64_t branching =
                std::min<std::uint64_t>(1 + rng.next_below(params.max_branching),
                                        params.state_count);
            // Distinct successors, in draw order.
            std::vector<StateId> succ;
            while (succ.size() < branching) {
                StateId t = states[rng.next_below(params.state_count)];
                if (std::find(succ.begin(), succ.end(), t) == succ.end()) succ.push_back(t);
            }
            std::vector<Rational> weights(succ.size());
            Rational total(0);
            for (auto& w : weights) {
                w = params.probability_pool[rng.next_below(params.probability_pool.size())];
                total += w;
            }
            for (std::size_t k = 0; k < succ.size(); ++k)
                b.add_branch(states[i], succ[k], weights[k] / total);
        }
    }

    b.set_initial(states[0]);
    b.set_target(states[inner]);
    b.set_sink(states[inner + 1]);

    // Graph reachability of the target from the initial state; one repair edge if not.
    StochasticGame game = b.build();
    std::vector<char> seen(game.state_count(), 0);
    std::deque<StateId> queue{game.initial()};
    seen[game.initial()] = 1;
    while (!queue.empty()) {
        StateId s = queue.front();
        queue.pop_front();
        for (const Action& act : game.actions(s))
            for (const Branch& br : act.branches)
                if (!seen[br.target]) {
                    seen[br.target] = 1;
                    queue.push_back(br.target);
                }
    }
    if (!seen[game.target()]) {
        GameBuilder repair;
        for (StateId s = 0; s < game.state_count(); ++s)
            repair.add_state(game.name(s), game.owner(s));
        for (StateId s = 0; s < game.state_count(); ++s) {
            if (game.is_terminal(s)) continue;
            for (const Action& act : game.actions(s)) {
                repair.add_action(s, act.label);
                for (const Branch& br : act.branches)
                    repair.add_branch(s, br.target, br.prob);
            }
            if (s == game.initial()) {
                repair.add_action(s, "reach");
                repair.add_branch(s, game.target(), Rational(1));
            }
        }
        repair.set_initial(game.initial());
        repair.set_target(game.target());
        repair.set_sink(game.sink());
        game = repair.build();
    }
    return game;
}

}  // namespace sg
