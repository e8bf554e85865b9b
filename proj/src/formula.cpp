#include "lss/formula.hpp"

#include <algorithm>
#include <tuple>

#include "lss/errors.hpp"

namespace lss {

Formula Formula::neg(Formula f) {
    if (f.kind == Kind::True) return falsity();
    if (f.kind == Kind::False) return truth();
    return {Kind::Not, -1, {std::move(f)}};
}

Formula Formula::conj(std::vector<Formula> fs) {
    std::vector<Formula> keep;
    for (auto& f : fs) {
        if (f.kind == Kind::False) return falsity();
        if (f.kind == Kind::True) continue;
        if (f.kind == Kind::And)
            for (auto& g : f.args) keep.push_back(std::move(g));
        else
            keep.push_back(std::move(f));
    }
    if (keep.empty()) return truth();
    if (keep.size() == 1) return std::move(keep[0]);
    return {Kind::And, -1, std::move(keep)};
}

Formula Formula::disj(std::vector<Formula> fs) {
    std::vector<Formula> keep;
    for (auto& f : fs) {
        if (f.kind == Kind::True) return truth();
        if (f.kind == Kind::False) continue;
        if (f.kind == Kind::Or)
            for (auto& g : f.args) keep.push_back(std::move(g));
        else
            keep.push_back(std::move(f));
    }
    if (keep.empty()) return falsity();
    if (keep.size() == 1) return std::move(keep[0]);
    return {Kind::Or, -1, std::move(keep)};
}

Formula operator&&(Formula a, Formula b) { return Formula::conj({std::move(a), std::move(b)}); }
Formula operator||(Formula a, Formula b) { return Formula::disj({std::move(a), std::move(b)}); }
Formula operator!(Formula a) { return Formula::neg(std::move(a)); }

bool eval(const Formula& f, const std::function<bool(int)>& v) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True: return true;
        case K::False: return false;
        case K::Atom: return v(f.atom);
        case K::Not: return !eval(f.args[0], v);
        case K::And:
            for (const auto& g : f.args)
                if (!eval(g, v)) return false;
            return true;
        case K::Or:
            for (const auto& g : f.args)
                if (eval(g, v)) return true;
            return false;
    }
    return false;
}

bool eval(const Formula& f, const std::map<int, bool>& valuation) {
    return eval(f, [&](int a) {
        auto it = valuation.find(a);
        if (it == valuation.end()) throw InputError("valuation misses atom " + std::to_string(a));
        return it->second;
    });
}

static void collect(const Formula& f, std::set<int>& out) {
    if (f.kind == Formula::Kind::Atom) out.insert(f.atom);
    for (const auto& g : f.args) collect(g, out);
}

std::set<int> atoms(const Formula& f) {
    std::set<int> s;
    collect(f, s);
    return s;
}

Formula map_atoms(const Formula& f, const std::function<Formula(int)>& g) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True:
        case K::False: return f;
        case K::Atom: return g(f.atom);
        case K::Not: return Formula::neg(map_atoms(f.args[0], g));
        case K::And:
        case K::Or: {
            std::vector<Formula> xs;
            for (const auto& a : f.args) xs.push_back(map_atoms(a, g));
            return f.kind == K::And ? Formula::conj(std::move(xs)) : Formula::disj(std::move(xs));
        }
    }
    return f;
}

std::size_t node_count(const Formula& f) {
    std::size_t n = 1;
    for (const auto& g : f.args) n += node_count(g);
    return n;
}

namespace {

// Conjunction of two literal sets; false when inconsistent.
bool merge(const Literals& a, const Literals& b, Literals& out) {
    out.pos.clear();
    out.neg.clear();
    std::set_union(a.pos.begin(), a.pos.end(), b.pos.begin(), b.pos.end(),
                   std::back_inserter(out.pos));
    std::set_union(a.neg.begin(), a.neg.end(), b.neg.begin(), b.neg.end(),
                   std::back_inserter(out.neg));
    std::vector<int> clash;
    std::set_intersection(out.pos.begin(), out.pos.end(), out.neg.begin(), out.neg.end(),
                          std::back_inserter(clash));
    return clash.empty();
}

bool subsumes(const Literals& a, const Literals& b) {
    return std::includes(b.pos.begin(), b.pos.end(), a.pos.begin(), a.pos.end()) &&
           std::includes(b.neg.begin(), b.neg.end(), a.neg.begin(), a.neg.end());
}

Dnf simplify(Dnf d) {
    std::sort(d.begin(), d.end(), [](const Literals& x, const Literals& y) {
        auto nx = x.pos.size() + x.neg.size(), ny = y.pos.size() + y.neg.size();
        return std::tie(nx, x) < std::tie(ny, y);
    });
    Dnf keep;
    for (auto& c : d) {
        bool redundant = false;
        for (const auto& k : keep)
            if (subsumes(k, c)) {
                redundant = true;
                break;
            }
        if (!redundant) keep.push_back(std::move(c));
    }
    return keep;
}

Dnf dnf_rec(const Formula& f, bool positive, std::size_t bound) {
    using K = Formula::Kind;
    auto check = [&](const Dnf& d) {
        if (d.size() > bound)
            throw DnfBlowup("DNF exceeds " + std::to_string(bound) + " disjuncts");
    };
    switch (f.kind) {
        case K::True: return positive ? Dnf{Literals{}} : Dnf{};
        case K::False: return positive ? Dnf{} : Dnf{Literals{}};
        case K::Atom:
            return positive ? Dnf{Literals{{f.atom}, {}}} : Dnf{Literals{{}, {f.atom}}};
        case K::Not: return dnf_rec(f.args[0], !positive, bound);
        case K::And:
        case K::Or: {
            bool is_and = (f.kind == K::And) == positive;
            if (!is_and) {
                Dnf r;
                for (const auto& g : f.args) {
                    Dnf s = dnf_rec(g, positive, bound);
                    r.insert(r.end(), s.begin(), s.end());
                    check(r);
                }
                return simplify(std::move(r));
            }
            Dnf acc{Literals{}};
            for (const auto& g : f.args) {
                Dnf s = dnf_rec(g, positive, bound);
                Dnf next;
                Literals m;
                for (const auto& a : acc)
                    for (const auto& b : s)
                        if (merge(a, b, m)) {
                            next.push_back(m);
                            check(next);
                        }
                acc = simplify(std::move(next));
                if (acc.empty()) break;
            }
            return acc;
        }
    }
    return {};
}

}  // namespace

Dnf to_dnf(const Formula& f, std::size_t bound) { return dnf_rec(f, true, bound); }

bool eval(const Literals& c, const std::function<bool(int)>& v) {
    for (int a : c.pos)
        if (!v(a)) return false;
    for (int a : c.neg)
        if (v(a)) return false;
    return true;
}

static std::string render(const Formula& f, const std::function<std::string(int)>& name,
                          int parent) {
    using K = Formula::Kind;
    // precedence: Or=1, And=2, Not/atom=3
    switch (f.kind) {
        case K::True: return "true";
        case K::False: return "false";
        case K::Atom: return name(f.atom);
        case K::Not: return "!" + render(f.args[0], name, 3);
        case K::And:
        case K::Or: {
            int prec = f.kind == K::And ? 2 : 1;
            std::string sep = f.kind == K::And ? " & " : " | ";
            std::string s;
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) s += sep;
                s += render(f.args[i], name, prec);
            }
            return prec < parent ? "(" + s + ")" : s;
        }
    }
    return "";
}

std::string to_string(const Formula& f, const std::function<std::string(int)>& name) {
    return render(f, name, 0);
}

}  // namespace lss
