#pragma once

// Brute-force reference implementations for the graph notions under test. Everything
// here works from the definitions over explicit subsets and shares no code with the
// library algorithms, so agreement is evidence, not tautology.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sg/game.hpp"
#include "sg/graph.hpp"

namespace sgtest {

using sg::ExactVector;
using sg::Rational;
using sg::StateId;
using sg::StateSet;
using sg::StochasticGame;

inline Rational exact_action_value(const StochasticGame& g, const ExactVector& v, StateId s,
                                   std::uint32_t a) {
    Rational total(0);
    for (const sg::Branch& br : g.actions(s)[a].branches) total += br.prob * v[br.target];
    return total;
}

inline std::vector<std::uint32_t> staying_actions(const StochasticGame& g, StateId s,
                                                  const std::vector<char>& inside) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t a = 0; a < g.actions(s).size(); ++a) {
        bool stays = true;
        for (const sg::Branch& br : g.actions(s)[a].branches)
            if (!inside[br.target]) {
                stays = false;
                break;
            }
        if (stays) out.push_back(a);
    }
    return out;
}

// T is an end component when every member keeps a fully-inside action and the kept
// sub-graph is strongly connected (checked by one BFS per member).
inline bool is_end_component(const StochasticGame& g, const StateSet& t) {
    if (t.empty()) return false;
    std::vector<char> inside(g.state_count(), 0);
    for (StateId s : t) inside[s] = 1;
    std::vector<std::vector<std::uint32_t>> keep(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        keep[i] = staying_actions(g, t[i], inside);
        if (keep[i].empty()) return false;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<char> seen(g.state_count(), 0);
        std::vector<StateId> queue{t[i]};
        seen[t[i]] = 1;
        while (!queue.empty()) {
            StateId u = queue.back();
            queue.pop_back();
            std::size_t ui = std::find(t.begin(), t.end(), u) - t.begin();
            for (std::uint32_t a : keep[ui])
                for (const sg::Branch& br : g.actions(u)[a].branches)
                    if (!seen[br.target]) {
                        seen[br.target] = 1;
                        queue.push_back(br.target);
                    }
        }
        for (StateId v : t)
            if (!seen[v]) return false;
    }
    return true;
}

inline std::vector<StateSet> brute_ecs(const StochasticGame& g) {
    const StateId n = static_cast<StateId>(g.state_count());
    std::vector<StateSet> out;
    for (std::uint64_t bits = 1; bits < (1ULL << n); ++bits) {
        StateSet t;
        for (StateId s = 0; s < n; ++s)
            if (bits & (1ULL << s)) t.push_back(s);
        if (is_end_component(g, t)) out.push_back(std::move(t));
    }
    return out;
}

inline bool subset_of(const StateSet& a, const StateSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline std::vector<StateSet> maximal_only(std::vector<StateSet> sets) {
    std::vector<StateSet> out;
    for (const StateSet& a : sets) {
        bool dominated = false;
        for (const StateSet& b : sets)
            if (a != b && subset_of(a, b)) {
                dominated = true;
                break;
            }
        if (!dominated) out.push_back(a);
    }
    return out;
}

inline std::vector<StateSet> brute_mecs(const StochasticGame& g) {
    return maximal_only(brute_ecs(g));
}

// Simple end component: an EC whose members all have value equal to the Maximizer's
// best exit value (0 when the Maximizer has no exiting pair).
inline bool is_simple(const StochasticGame& g, const StateSet& t, const ExactVector& v) {
    std::vector<char> inside(g.state_count(), 0);
    for (StateId s : t) inside[s] = 1;
    Rational exit(0);
    for (StateId s : t) {
        if (g.owner(s) != sg::Player::maximizer) continue;
        for (std::uint32_t a = 0; a < g.actions(s).size(); ++a) {
            bool leaves = false;
            for (const sg::Branch& br : g.actions(s)[a].branches)
                if (!inside[br.target]) {
                    leaves = true;
                    break;
                }
            if (!leaves) continue;
            Rational value = exact_action_value(g, v, s, a);
            if (value > exit) exit = value;
        }
    }
    for (StateId s : t)
        if (v[s] != exit) return false;
    return true;
}

inline std::vector<StateSet> brute_msecs(const StochasticGame& g, const ExactVector& v) {
    std::vector<StateSet> secs;
    for (const StateSet& t : brute_ecs(g))
        if (is_simple(g, t, v)) secs.push_back(t);
    return maximal_only(std::move(secs));
}

inline std::vector<StateSet> states_of(const std::vector<sg::EndComponent>& components) {
    std::vector<StateSet> out;
    for (const sg::EndComponent& c : components) out.push_back(c.states);
    return out;
}

inline bool same_sets(std::vector<StateSet> a, std::vector<StateSet> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

}  // namespace sgtest
