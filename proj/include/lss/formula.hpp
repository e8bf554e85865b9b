#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace lss {

/// Boolean formula over integer atoms ("inf" variables).
struct Formula {
    enum class Kind : unsigned char { True, False, Atom, Not, And, Or };

    Kind kind = Kind::True;
    int atom = -1;
    std::vector<Formula> args;

    static Formula truth() { return {Kind::True, -1, {}}; }
    static Formula falsity() { return {Kind::False, -1, {}}; }
    static Formula var(int a) { return {Kind::Atom, a, {}}; }
    static Formula neg(Formula f);
    static Formula conj(std::vector<Formula> fs);
    static Formula disj(std::vector<Formula> fs);

    bool operator==(const Formula&) const = default;
};

Formula operator&&(Formula a, Formula b);
Formula operator||(Formula a, Formula b);
Formula operator!(Formula a);

bool eval(const Formula& f, const std::function<bool(int)>& valuation);
/// Throws InputError when an atom is missing from the map.
bool eval(const Formula& f, const std::map<int, bool>& valuation);

std::set<int> atoms(const Formula& f);
Formula map_atoms(const Formula& f, const std::function<Formula(int)>& g);
std::size_t node_count(const Formula& f);

/// Conjunction of positive and negative atoms (sorted, disjoint).
struct Literals {
    std::vector<int> pos;
    std::vector<int> neg;
    bool operator==(const Literals&) const = default;
    bool operator<(const Literals& o) const {
        return std::tie(pos, neg) < std::tie(o.pos, o.neg);
    }
};
using Dnf = std::vector<Literals>;

/// Equivalent disjunction of consistent conjunctions; throws DnfBlowup
/// beyond `bound` disjuncts.
Dnf to_dnf(const Formula& f, std::size_t bound = 4096);
bool eval(const Literals& c, const std::function<bool(int)>& valuation);

std::string to_string(const Formula& f, const std::function<std::string(int)>& name);

}  // namespace lss
