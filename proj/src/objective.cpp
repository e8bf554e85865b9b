#include "lss/objective.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "lss/errors.hpp"

namespace lss {

int Dfa::add_state(const std::string& name) {
    states.push_back(name);
    delta.emplace_back(letters, -1);
    return static_cast<int>(states.size()) - 1;
}

int Dfa::find_state(const std::string& name) const {
    auto it = std::find(states.begin(), states.end(), name);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

bool Dfa::total() const {
    for (const auto& row : delta)
        for (int t : row)
            if (t < 0) return false;
    return true;
}

Dfa blank_dfa(const Process& p) {
    Dfa d;
    d.letters = static_cast<int>(p.actions.size()) + 1;
    return d;
}

void complete(Dfa& d) {
    if (d.total() && !d.states.empty()) return;
    if (d.states.empty()) {
        d.add_state("init");
        d.initial = 0;
    }
    if (d.total()) return;
    int sink = d.find_state(kSink);
    if (sink < 0) sink = d.add_state(kSink);
    for (auto& row : d.delta)
        for (int& t : row)
            if (t < 0) t = sink;
}

void Objective::validate(const System& sys) const {
    if (automata.size() != sys.procs.size())
        throw InputError("objective has " + std::to_string(automata.size()) +
                         " automata for " + std::to_string(sys.procs.size()) + " processes");
    for (std::size_t p = 0; p < automata.size(); ++p) {
        const Dfa& d = automata[p];
        const std::string& name = sys.procs[p].name;
        if (d.letters != static_cast<int>(sys.procs[p].actions.size()) + 1)
            throw InputError("objective automaton of " + name + " has a wrong alphabet");
        if (d.states.empty() || d.initial < 0 || d.initial >= static_cast<int>(d.states.size()))
            throw InputError("objective automaton of " + name + " has no valid initial state");
        if (!d.total()) throw InputError("objective automaton of " + name + " is not total");
    }
    for (int a : atoms(phi)) {
        int p = atom_proc(a), s = atom_state(a);
        if (p < 0 || p >= static_cast<int>(automata.size()) ||
            s >= static_cast<int>(automata[p].states.size()))
            throw InputError("formula atom " + std::to_string(a) + " references no state");
    }
}

static Dfa one_state(const Process& p) {
    Dfa d = blank_dfa(p);
    d.add_state("any");
    std::fill(d.delta[0].begin(), d.delta[0].end(), 0);
    return d;
}

Objective universal(const System& sys) {
    Objective o;
    for (const auto& p : sys.procs) o.automata.push_back(one_state(p));
    return o;
}

static Dfa live_done(const Process& p) {
    Dfa d = blank_dfa(p);
    int live = d.add_state("live");
    int done = d.add_state("done");
    for (int a = 0; a + 1 < d.letters; ++a) {
        d.delta[live][a] = live;
        d.delta[done][a] = live;  // unreachable: PAD is never followed by a real letter
    }
    d.delta[live][d.pad_letter()] = done;
    d.delta[done][d.pad_letter()] = done;
    return d;
}

static void check_proc(const System& sys, int proc) {
    if (proc < 0 || proc >= static_cast<int>(sys.procs.size()))
        throw InputError("unknown process index " + std::to_string(proc));
}

Objective process_deadlock(const System& sys, int proc) {
    check_proc(sys, proc);
    Objective o = universal(sys);
    o.automata[proc] = live_done(sys.procs[proc]);
    o.phi = Formula::var(inf_atom(proc, 1));
    return o;
}

Objective global_deadlock(const System& sys) {
    Objective o;
    std::vector<Formula> all;
    for (std::size_t p = 0; p < sys.procs.size(); ++p) {
        o.automata.push_back(live_done(sys.procs[p]));
        all.push_back(Formula::var(inf_atom(static_cast<int>(p), 1)));
    }
    o.phi = Formula::conj(std::move(all));
    return o;
}

Objective local_reach_forever(const System& sys, int proc, const std::vector<int>& targets) {
    check_proc(sys, proc);
    const Process& p = sys.procs[proc];
    Objective o = universal(sys);
    Dfa d = blank_dfa(p);
    const int n = static_cast<int>(p.states.size());
    for (int s = 0; s < n; ++s) d.add_state(p.states[s]);
    for (int s = 0; s < n; ++s) d.add_state(p.states[s] + "#padded");
    d.initial = p.initial;
    for (int s = 0; s < n; ++s) {
        for (const Edge& e : p.out[s]) d.delta[s][e.action] = e.to;
        d.delta[s][d.pad_letter()] = n + s;
        d.delta[n + s][d.pad_letter()] = n + s;
    }
    complete(d);
    std::vector<Formula> any;
    for (int s : targets) {
        if (s < 0 || s >= n) throw InputError("unknown state index " + std::to_string(s));
        any.push_back(Formula::var(inf_atom(proc, s)));
        any.push_back(Formula::var(inf_atom(proc, n + s)));
    }
    o.automata[proc] = std::move(d);
    o.phi = Formula::disj(std::move(any));
    return o;
}

Objective complement(Objective o) {
    o.phi = Formula::neg(std::move(o.phi));
    return o;
}

Objective conjoin(const Objective& a, const Objective& b, std::size_t budget) {
    if (a.automata.size() != b.automata.size())
        throw InputError("conjoin: objectives over different process sets");
    Objective r;
    std::vector<std::map<std::pair<int, int>, int>> index(a.automata.size());
    for (std::size_t p = 0; p < a.automata.size(); ++p) {
        const Dfa& x = a.automata[p];
        const Dfa& y = b.automata[p];
        if (x.letters != y.letters) throw InputError("conjoin: alphabet mismatch");
        Dfa d;
        d.letters = x.letters;
        std::vector<std::pair<int, int>> pairs;
        auto intern = [&](int i, int j) {
            auto [it, fresh] = index[p].emplace(std::pair{i, j}, static_cast<int>(pairs.size()));
            if (fresh) {
                if (pairs.size() >= budget) throw BudgetExceeded("conjoin: state budget");
                pairs.emplace_back(i, j);
                d.add_state(x.states[i] + "|" + y.states[j]);
            }
            return it->second;
        };
        d.initial = intern(x.initial, y.initial);
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (int l = 0; l < d.letters; ++l) {
                auto [i, j] = pairs[k];
                int t = intern(x.next(i, l), y.next(j, l));
                d.delta[k][l] = t;
            }
        r.automata.push_back(std::move(d));
    }
    auto lift = [&](int side) {
        return [&, side](int atom) {
            int p = atom_proc(atom), s = atom_state(atom);
            std::vector<Formula> any;
            for (const auto& [key, id] : index[p])
                if ((side == 0 ? key.first : key.second) == s)
                    any.push_back(Formula::var(inf_atom(p, id)));
            return Formula::disj(std::move(any));
        };
    };
    r.phi = map_atoms(a.phi, lift(0)) && map_atoms(b.phi, lift(1));
    return r;
}

std::vector<int> pad_cycle(const Dfa& d, int state) {
    std::vector<int> seen(d.states.size(), -1);
    std::vector<int> path;
    int cur = state;
    while (seen[cur] < 0) {
        seen[cur] = static_cast<int>(path.size());
        path.push_back(cur);
        cur = d.next(cur, d.pad_letter());
    }
    std::vector<int> cyc(path.begin() + seen[cur], path.end());
    std::sort(cyc.begin(), cyc.end());
    return cyc;
}

std::vector<int> recurrent_states(const Dfa& d, const std::vector<int>& stem,
                                  const std::vector<int>& loop) {
    int cur = d.initial;
    for (int a : stem) cur = d.next(cur, a);
    if (loop.empty()) return pad_cycle(d, cur);
    // iterate the loop until its entry state repeats
    std::map<int, int> entry;
    std::vector<std::vector<int>> visits;
    while (!entry.count(cur)) {
        entry[cur] = static_cast<int>(visits.size());
        std::vector<int> v;
        for (int a : loop) {
            cur = d.next(cur, a);
            v.push_back(cur);
        }
        visits.push_back(std::move(v));
    }
    std::vector<int> r;
    for (std::size_t i = entry[cur]; i < visits.size(); ++i)
        r.insert(r.end(), visits[i].begin(), visits[i].end());
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

std::vector<Literals> split_by_process(const Literals& c, std::size_t nprocs) {
    std::vector<Literals> r(nprocs);
    for (int a : c.pos) r.at(atom_proc(a)).pos.push_back(atom_state(a));
    for (int a : c.neg) r.at(atom_proc(a)).neg.push_back(atom_state(a));
    return r;
}

std::vector<std::string> padded_letters(const Process& p) {
    std::vector<std::string> l = p.actions;
    l.push_back(kPad);
    return l;
}

Ela dfa_ela(const Dfa& d, const Process& p, const Literals& local) {
    Ela e;
    e.letters = padded_letters(p);
    for (const auto& s : d.states) e.add_state(s);
    for (std::size_t s = 0; s < d.states.size(); ++s)
        for (int l = 0; l < d.letters; ++l) e.add_edge(static_cast<int>(s), l, d.next(s, l));
    e.initial = d.initial;
    std::vector<Formula> c;
    for (int s : local.pos) c.push_back(Formula::var(s));
    for (int s : local.neg) c.push_back(!Formula::var(s));
    e.acceptance = Formula::conj(std::move(c));
    return e;
}

Ela process_ela(const Process& p, const std::vector<char>& pad_ok) {
    Ela e;
    e.letters = padded_letters(p);
    const int pad = static_cast<int>(p.actions.size());
    for (const auto& s : p.states) e.add_state(s);
    for (std::size_t s = 0; s < p.states.size(); ++s) {
        for (const Edge& x : p.out[s]) e.add_edge(static_cast<int>(s), x.action, x.to);
        if (pad_ok[s]) e.add_edge(static_cast<int>(s), pad, static_cast<int>(s));
    }
    e.initial = p.initial;
    return e;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Parser {
    const std::string& s;
    const System& sys;
    const Objective& o;
    std::size_t i = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("formula: " + what + " at offset " + std::to_string(i));
    }
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    std::string name() {
        skip();
        std::size_t b = i;
        while (i < s.size() && s[i] != ',' && s[i] != ')' && s[i] != '(' &&
               !std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        if (b == i) fail("expected a name");
        return s.substr(b, i - b);
    }
    bool keyword(const char* kw) {
        skip();
        std::size_t n = std::char_traits<char>::length(kw);
        if (s.compare(i, n, kw) != 0) return false;
        std::size_t j = i + n;
        if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return false;
        i = j;
        return true;
    }

    Formula disj() {
        std::vector<Formula> xs{conj()};
        while (eat('|')) xs.push_back(conj());
        return Formula::disj(std::move(xs));
    }
    Formula conj() {
        std::vector<Formula> xs{unary()};
        while (eat('&')) xs.push_back(unary());
        return Formula::conj(std::move(xs));
    }
    Formula unary() {
        if (eat('!')) return Formula::neg(unary());
        if (eat('(')) {
            Formula f = disj();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (keyword("true")) return Formula::truth();
        if (keyword("false")) return Formula::falsity();
        if (keyword("inf")) {
            if (!eat('(')) fail("expected '(' after inf");
            std::string pn = name();
            if (!eat(',')) fail("expected ','");
            std::string sn = name();
            if (!eat(')')) fail("expected ')'");
            int p = sys.find_process(pn);
            if (p < 0) fail("unknown process '" + pn + "'");
            int st = o.automata.at(p).find_state(sn);
            if (st < 0) fail("unknown objective state '" + sn + "' of " + pn);
            return Formula::var(inf_atom(p, st));
        }
        fail("unexpected input");
    }
};

}  // namespace

Formula parse_formula(const std::string& text, const System& sys, const Objective& o) {
    Parser ps{text, sys, o};
    Formula f = ps.disj();
    ps.skip();
    if (ps.i != text.size()) ps.fail("trailing input");
    return f;
}

std::string format_formula(const Formula& f, const System& sys, const Objective& o) {
    return to_string(f, [&](int a) {
        int p = atom_proc(a), s = atom_state(a);
        return "inf(" + sys.procs.at(p).name + "," + o.automata.at(p).states.at(s) + ")";
    });
}

}  // namespace lss
