#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lss/formula.hpp"

namespace lss {

/// Emerson-Lei automaton. Letters are indices into `letters`; the
/// acceptance formula's atoms are state ids (atom s = "s is visited
/// infinitely often").
struct Ela {
    std::vector<std::string> states;
    std::vector<std::string> letters;
    std::vector<std::vector<std::pair<int, int>>> delta;  // per state: (letter, target), sorted
    std::vector<std::vector<int>> eps;                    // epsilon successors
    int initial = 0;
    Formula acceptance = Formula::truth();

    int add_state(const std::string& name);
    void add_edge(int from, int letter, int to);
    void add_eps(int from, int to);
    std::size_t size() const { return states.size(); }
    bool has_eps() const;
    std::vector<int> successors(int state, int letter) const;
};

/// Removes epsilon edges: s -a-> t is added whenever s reaches u by
/// epsilon edges and u -a-> t.
Ela eliminate_epsilon(const Ela& a);

/// Synchronous product of automata over the same alphabet (compared by
/// letter names), restricted to reachable tuples. A component atom
/// inf_s becomes the disjunction of inf over product states whose
/// coordinate is s; the acceptance is the conjunction of the components'.
/// `tuples`, when given, receives the component states of every product
/// state.
Ela product(const std::vector<const Ela*>& parts, std::size_t budget = 2'000'000,
            std::vector<std::vector<int>>* tuples = nullptr);

/// Sub-automaton on the states with keep[s]; atoms of dropped states
/// become false.
Ela restrict_to(const Ela& a, const std::vector<char>& keep);

struct ElaLasso {
    std::vector<int> stem;         // letters
    std::vector<int> loop;         // letters, nonempty
    std::vector<int> stem_states;  // stem.size() + 1 states, ends at the loop start
    std::vector<int> loop_states;  // loop.size() + 1 states, first == last
};

/// Accepting lasso or nullopt when the language is empty.
std::optional<ElaLasso> find_accepting_lasso(const Ela& a, std::size_t dnf_bound = 4096);

/// Membership of the ultimately periodic word stem . loop^omega.
bool accepts(const Ela& a, const std::vector<int>& stem, const std::vector<int>& loop);

/// States visited by the loop of a lasso, as a sorted set.
std::vector<int> loop_state_set(const ElaLasso& l);

}  // namespace lss
