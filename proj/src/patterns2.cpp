#include "lss/patterns2.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

#include "graph.hpp"
#include "lss/errors.hpp"

namespace lss {

LockSet Pattern2::owned() const {
    if (!infinitary) return owns;
    LockSet r = ~LockSet{0};
    for (LockSet s : inf_sets) r &= s;
    return inf_sets.empty() ? 0 : r;
}

bool Pattern2::switching() const {
    return infinitary && !std::binary_search(inf_sets.begin(), inf_sets.end(), LockSet{0}) &&
           owned() == 0;
}

LockSet Pattern2::inf_union() const {
    LockSet r = 0;
    for (LockSet s : inf_sets) r |= s;
    return r;
}

Pattern2 Pattern2::infinite(std::vector<LockSet> sets, bool strong) {
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    return {true, strong, 0, std::move(sets)};
}

static std::string set_name(LockSet s, const System& sys) {
    std::string r = "{";
    bool first = true;
    for (int t : members(s)) {
        if (!first) r += ",";
        r += t < static_cast<int>(sys.locks.size()) ? sys.locks[t] : std::to_string(t);
        first = false;
    }
    return r + "}";
}

std::string to_string(const Pattern2& p, const System& sys) {
    std::string s = p.strong ? "strong " : "weak ";
    if (!p.infinitary) return s + set_name(p.owns, sys);
    s += "inf{";
    for (std::size_t i = 0; i < p.inf_sets.size(); ++i) {
        if (i) s += ",";
        s += set_name(p.inf_sets[i], sys);
    }
    s += "}";
    if (p.switching()) s += " switching";
    return s;
}

std::array<int, 2> lock_pair(const Process& p) {
    auto ls = members(p.locks());
    if (ls.size() != 2)
        throw Inapplicable("2lss", "process " + p.name + " has " + std::to_string(ls.size()) +
                                       " locks, expected 2");
    return {ls[0], ls[1]};
}

Pattern2 pattern_of_local_lasso(const Process& p, const LocalLasso& run) {
    if (popcount(p.locks()) > 2)
        throw InputError("process " + p.name + " uses more than two locks");
    validate_local_lasso(p, run);
    std::vector<int> all = run.stem;
    all.insert(all.end(), run.loop.begin(), run.loop.end());
    auto steps = execute_local(p, all);
    // strength: the last lock operation releases the other lock while the
    // held set is a singleton; an infinitary run must not touch locks in the loop
    auto last_op_releases_other = [&](std::size_t upto, LockSet held) {
        for (std::size_t i = upto; i-- > 0;) {
            const LockOp& o = p.op(all[i]);
            if (o.kind == OpKind::Nop) continue;
            return o.kind == OpKind::Rel && !has(held, o.lock);
        }
        return false;
    };
    const std::size_t k = run.stem.size();
    if (run.finite()) {
        LockSet held = steps.back().held;
        bool strong = popcount(held) == 1 && last_op_releases_other(all.size(), held);
        return Pattern2::finitary(held, strong);
    }
    std::vector<LockSet> sets;
    bool loop_ops = false;
    for (std::size_t i = k; i < all.size(); ++i) {
        sets.push_back(steps[i].held);
        if (p.op(all[i]).kind != OpKind::Nop) loop_ops = true;
    }
    LockSet held = steps[k].held;
    bool strong = !loop_ops && popcount(held) == 1 && last_op_releases_other(k, held);
    return Pattern2::infinite(std::move(sets), strong);
}

std::vector<Pattern2> all_patterns(std::array<int, 2> pair) {
    const LockSet a = bit(pair[0]), b = bit(pair[1]);
    std::vector<Pattern2> r{Pattern2::finitary(0),         Pattern2::finitary(a),
                            Pattern2::finitary(b),         Pattern2::finitary(a, true),
                            Pattern2::finitary(b, true),   Pattern2::finitary(a | b),
                            Pattern2::infinite({a}, true), Pattern2::infinite({b}, true)};
    const LockSet subsets[4] = {0, a, b, a | b};
    std::vector<Pattern2> sw;
    for (int m = 1; m < 16; ++m) {
        std::vector<LockSet> s;
        for (int i = 0; i < 4; ++i)
            if ((m >> i) & 1) s.push_back(subsets[i]);
        Pattern2 p = Pattern2::infinite(std::move(s));
        (p.switching() ? sw : r).push_back(std::move(p));
    }
    r.insert(r.end(), sw.begin(), sw.end());
    return r;
}

// ---------------------------------------------------------------- recogniser

namespace {

// Ownership states of the recogniser; padded copies are +6.
enum : int { kNone = 0, kAw = 1, kAs = 2, kBw = 3, kBs = 4, kAB = 5, kPadOff = 6 };

int finitary_state(const Pattern2& pat, LockSet a, LockSet b) {
    if (pat.owns == 0) return pat.strong ? -1 : kNone;
    if (pat.owns == a) return pat.strong ? kAs : kAw;
    if (pat.owns == b) return pat.strong ? kBs : kBw;
    if (pat.owns == (a | b)) return pat.strong ? -1 : kAB;
    return -1;
}

}  // namespace

Ela build_pattern_ela(const Process& p, const Pattern2& pat) {
    auto [ta, tb] = lock_pair(p);
    const LockSet a = bit(ta), b = bit(tb);
    Ela e;
    e.letters = padded_letters(p);
    const char* names[6] = {"{}", "{1}", "{1}!", "{2}", "{2}!", "{1,2}"};
    for (int i = 0; i < 6; ++i) e.add_state(names[i]);
    for (int i = 0; i < 6; ++i) e.add_state(std::string("#") + names[i]);
    e.initial = kNone;
    const int pad = static_cast<int>(p.actions.size());
    for (int x = 0; x < pad; ++x) {
        const LockOp& o = p.op(x);
        if (o.kind == OpKind::Nop) {
            for (int s = 0; s < 6; ++s) e.add_edge(s, x, s);
        } else if (o.kind == OpKind::Get) {
            bool first = o.lock == ta;
            if (first) {
                e.add_edge(kNone, x, kAw);
                e.add_edge(kBw, x, kAB);
                e.add_edge(kBs, x, kAB);
            } else {
                e.add_edge(kNone, x, kBw);
                e.add_edge(kAw, x, kAB);
                e.add_edge(kAs, x, kAB);
            }
        } else {
            bool first = o.lock == ta;
            if (first) {
                e.add_edge(kAw, x, kNone);
                e.add_edge(kAs, x, kNone);
                e.add_edge(kAB, x, kBs);
            } else {
                e.add_edge(kBw, x, kNone);
                e.add_edge(kBs, x, kNone);
                e.add_edge(kAB, x, kAs);
            }
        }
    }
    for (int s = 0; s < 6; ++s) {
        e.add_edge(s, pad, s + kPadOff);
        e.add_edge(s + kPadOff, pad, s + kPadOff);
    }
    auto v = [](int s) { return Formula::var(s); };
    auto only = [&](int s) {
        std::vector<Formula> c{v(s)};
        for (int x = 0; x < 12; ++x)
            if (x != s) c.push_back(!v(x));
        return Formula::conj(std::move(c));
    };
    if (!pat.infinitary) {
        int s = finitary_state(pat, a, b);
        e.acceptance = s < 0 ? Formula::falsity() : v(s + kPadOff);
        return e;
    }
    const auto& sets = pat.inf_sets;
    if (sets.size() == 1 && (sets[0] == a || sets[0] == b)) {
        bool is_a = sets[0] == a;
        e.acceptance = only(pat.strong ? (is_a ? kAs : kBs) : (is_a ? kAw : kBw));
        return e;
    }
    if (pat.strong || sets.empty()) {
        e.acceptance = Formula::falsity();
        return e;
    }
    auto phi = [&](LockSet j) {
        if (j == 0) return v(kNone);
        if (j == a) return v(kAw) || v(kAs);
        if (j == b) return v(kBw) || v(kBs);
        return v(kAB);
    };
    std::vector<Formula> c;
    for (LockSet j : {LockSet{0}, a, b, a | b}) {
        bool in = std::binary_search(sets.begin(), sets.end(), j);
        c.push_back(in ? phi(j) : !phi(j));
    }
    for (LockSet j : sets)
        if ((j & ~(a | b)) != 0) c.push_back(Formula::falsity());
    e.acceptance = Formula::conj(std::move(c));
    return e;
}

// ---------------------------------------------------------------- compatibility

namespace {

struct UnionFind {
    std::vector<int> up;
    explicit UnionFind(int n) : up(n) { std::iota(up.begin(), up.end(), 0); }
    int find(int x) { return up[x] == x ? x : up[x] = find(up[x]); }
    bool unite(int x, int y) {
        x = find(x);
        y = find(y);
        if (x == y) return false;
        up[x] = y;
        return true;
    }
};

// Infinite-graph condition over switching edges (label, pair) and
// processes whose Inf contains their whole pair. Empty string when ok.
std::string inf_graph_violation(int nlocks,
                                const std::vector<std::pair<int, std::array<int, 2>>>& sw,
                                const std::vector<std::pair<int, std::array<int, 2>>>& full) {
    UnionFind all(nlocks);
    for (const auto& [q, e] : sw)
        if (!all.unite(e[0], e[1])) return "the switching-process graph has a cycle";
    for (const auto& [p, e] : full) {
        UnionFind uf(nlocks);
        for (const auto& [q, f] : sw)
            if (q != p) uf.unite(f[0], f[1]);
        if (uf.find(e[0]) == uf.find(e[1]))
            return "locks of process " + std::to_string(p) +
                   " are connected by other switching processes";
    }
    return {};
}

std::pair<int, int> strong_edge(const Pattern2& pat, std::array<int, 2> locks) {
    if (!pat.strong) return {-1, -1};
    LockSet o = pat.infinitary ? pat.inf_union() : pat.owns;
    if (o == bit(locks[0])) return {locks[0], locks[1]};
    if (o == bit(locks[1])) return {locks[1], locks[0]};
    return {-1, -1};
}

bool full_in_inf(const Pattern2& pat, std::array<int, 2> locks) {
    return pat.infinitary && std::binary_search(pat.inf_sets.begin(), pat.inf_sets.end(),
                                                bit(locks[0]) | bit(locks[1]));
}

}  // namespace

Compatibility check_patterns_compatible(const std::vector<PatternEntry>& es, int nlocks) {
    Compatibility r;
    auto fail = [&](int idx, std::string why) {
        r.ok = false;
        r.violated = idx;
        r.reason = std::move(why);
        return r;
    };
    const int n = static_cast<int>(es.size());
    for (int p = 0; p < n; ++p)
        if (!es[p].pattern.infinitary && es[p].end_has_non_get)
            return fail(1, "process " + std::to_string(p) + " ends in a state with a non-get exit");
    LockSet owned = 0;
    for (int p = 0; p < n; ++p) {
        LockSet o = es[p].pattern.owned();
        if (owned & o) return fail(2, "owned lock sets overlap at process " + std::to_string(p));
        owned |= o;
    }
    for (int p = 0; p < n; ++p)
        if (!es[p].pattern.infinitary && (es[p].blocks & ~owned))
            return fail(3, "process " + std::to_string(p) + " can acquire a lock nobody keeps");
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            if (p != q && es[q].pattern.infinitary &&
                (es[p].pattern.owned() & es[q].pattern.inf_union()))
                return fail(4, "process " + std::to_string(p) + " keeps a lock process " +
                                   std::to_string(q) + " uses forever");
    std::vector<std::pair<int, int>> edges;
    for (int p = 0; p < n; ++p) {
        auto e = strong_edge(es[p].pattern, es[p].locks);
        if (e.first >= 0) edges.push_back(e);
    }
    auto order = detail::topo_order(nlocks, edges);
    if (order.empty() && nlocks > 0) return fail(5, "strong patterns impose a cyclic lock order");
    std::vector<std::pair<int, std::array<int, 2>>> sw, full;
    for (int p = 0; p < n; ++p) {
        if (es[p].pattern.switching()) sw.push_back({p, es[p].locks});
        if (full_in_inf(es[p].pattern, es[p].locks)) full.push_back({p, es[p].locks});
    }
    if (auto why = inf_graph_violation(nlocks, sw, full); !why.empty()) return fail(6, why);
    r.order = std::move(order);
    return r;
}

PatternEntry entry_of(const Process& p, const LocalLasso& run) {
    PatternEntry e;
    e.pattern = pattern_of_local_lasso(p, run);
    auto ls = members(p.locks());
    if (ls.size() == 2) e.locks = {ls[0], ls[1]};
    else if (ls.size() == 1) e.locks = {ls[0], ls[0]};
    else e.locks = {-1, -1};
    if (run.finite()) {
        int end = execute_local(p, run.stem).back().state;
        e.blocks = p.gettable(end);
        for (const Edge& x : p.out[end])
            if (p.op(x.action).kind != OpKind::Get) e.end_has_non_get = true;
    }
    return e;
}

// ---------------------------------------------------------------- verifier

namespace {

struct Item {
    Pattern2 pat;
    LocalLasso run;
    LockSet need = 0;     // locks that must be kept by someone (end-state blocks)
    LockSet owned = 0;
    LockSet inf = 0;
    std::pair<int, int> edge{-1, -1};
    bool sw = false;
    bool full = false;
};

LocalLasso to_local(const ElaLasso& l, int pad) {
    LocalLasso r;
    bool padded = false;
    for (int x : l.stem) {
        if (x == pad) padded = true;
        if (!padded) r.stem.push_back(x);
    }
    if (padded) return r;
    bool loop_pad = false;
    for (int x : l.loop) loop_pad = loop_pad || x == pad;
    if (loop_pad) {
        for (int x : l.loop) {
            if (x == pad) break;
            r.stem.push_back(x);
        }
        return r;
    }
    r.loop = l.loop;
    return r;
}

std::vector<Item> domain_of(const Process& P, const Dfa& B, const Literals& lits) {
    std::array<int, 2> pair = lock_pair(P);
    const LockSet both = bit(pair[0]) | bit(pair[1]);
    const int pad = static_cast<int>(P.actions.size());
    Ela b = dfa_ela(B, P, lits);
    std::vector<Item> items;
    std::map<std::tuple<LockSet, LockSet, LockSet, int, int, bool, bool>, int> seen;
    auto add = [&](const Pattern2& pat, LockSet need, const ElaLasso& l) {
        Item it;
        it.pat = pat;
        it.run = to_local(l, pad);
        it.need = need;
        it.owned = pat.owned();
        it.inf = pat.inf_union();
        it.edge = strong_edge(pat, pair);
        it.sw = pat.switching();
        it.full = full_in_inf(pat, pair);
        auto sig = std::make_tuple(it.need, it.owned, it.inf, it.edge.first, it.edge.second, it.sw,
                                   it.full);
        if (seen.emplace(sig, 1).second) items.push_back(std::move(it));
    };
    std::vector<char> no_pad(P.states.size(), 0);
    for (const Pattern2& pat : all_patterns(pair)) {
        Ela pe = build_pattern_ela(P, pat);
        if (pat.infinitary) {
            Ela a = process_ela(P, no_pad);
            Ela prod = product({&a, &b, &pe});
            if (auto l = find_accepting_lasso(prod)) add(pat, 0, *l);
            continue;
        }
        std::vector<LockSet> found;
        for (LockSet r : {LockSet{0}, bit(pair[0]), bit(pair[1]), both}) {
            bool dominated = false;
            for (LockSet f : found) dominated = dominated || (f & ~r) == 0;
            if (dominated) continue;
            std::vector<char> ok(P.states.size(), 0);
            for (std::size_t s = 0; s < P.states.size(); ++s)
                ok[s] = P.all_get_in(static_cast<int>(s), r);
            Ela a = process_ela(P, ok);
            Ela prod = product({&a, &b, &pe});
            if (auto l = find_accepting_lasso(prod)) {
                found.push_back(r);
                add(pat, r, *l);
            }
        }
    }
    return items;
}

bool acyclic_with(int nlocks, const std::vector<std::pair<int, int>>& edges) {
    return nlocks == 0 || !detail::topo_order(nlocks, edges).empty();
}

struct Search {
    int nlocks;
    std::vector<std::array<int, 2>> pairs;
    std::vector<std::vector<Item>> dom;
    std::vector<int> order;      // process order
    std::vector<int> choice;     // item index per process, -1 unassigned

    bool consistent(int p, const Item& it) {
        const int n = static_cast<int>(dom.size());
        std::vector<std::pair<int, int>> edges;
        if (it.edge.first >= 0) edges.push_back(it.edge);
        std::vector<std::pair<int, std::array<int, 2>>> sw, full;
        if (it.sw) sw.push_back({p, pairs[p]});
        if (it.full) full.push_back({p, pairs[p]});
        LockSet owned = it.owned;
        for (int q = 0; q < n; ++q) {
            if (choice[q] < 0) continue;
            const Item& o = dom[q][choice[q]];
            if (o.owned & it.owned) return false;
            if (it.pat.infinitary && (o.owned & it.inf)) return false;
            if (o.pat.infinitary && (it.owned & o.inf)) return false;
            if (o.edge.first >= 0) edges.push_back(o.edge);
            if (o.sw) sw.push_back({q, pairs[q]});
            if (o.full) full.push_back({q, pairs[q]});
            owned |= o.owned;
        }
        if (it.edge.first >= 0 && !acyclic_with(nlocks, edges)) return false;
        if ((it.sw || it.full) && !inf_graph_violation(nlocks, sw, full).empty()) return false;
        // every needed lock must be kept by an assigned process or possibly
        // by an unassigned one
        LockSet need = it.need;
        for (int q = 0; q < n; ++q)
            if (choice[q] >= 0) need |= dom[q][choice[q]].need;
        LockSet missing = need & ~owned;
        if (missing) {
            LockSet possible = 0;
            for (int q = 0; q < n; ++q)
                if (choice[q] < 0 && q != p)
                    for (const Item& x : dom[q])
                        if (!(x.owned & owned)) possible |= x.owned;
            if (missing & ~possible) return false;
        }
        return true;
    }

    bool run(std::size_t k) {
        if (k == order.size()) return true;
        int p = order[k];
        for (std::size_t i = 0; i < dom[p].size(); ++i) {
            if (!consistent(p, dom[p][i])) continue;
            choice[p] = static_cast<int>(i);
            if (run(k + 1)) return true;
            choice[p] = -1;
        }
        return false;
    }
};

}  // namespace

Verdict2 verify_2lss(const System& sys_in, const Objective& obj) {
    sys_in.validate();
    obj.validate(sys_in);
    auto snd = check_sound(sys_in);
    if (!snd.sound)
        throw Inapplicable("sound", "system is not sound (process " +
                                        sys_in.procs[snd.violation->proc].name + ")");
    TwoLockView view = pad_to_two_locks(sys_in);
    const System& sys = view.sys;
    const int n = static_cast<int>(sys.procs.size());
    const int nlocks = static_cast<int>(sys.locks.size());
    Dnf dnf = to_dnf(obj.phi);
    std::map<std::pair<int, Literals>, std::vector<Item>> cache;
    for (std::size_t d = 0; d < dnf.size(); ++d) {
        auto local = split_by_process(dnf[d], n);
        Search s{nlocks, view.pair, {}, {}, std::vector<int>(n, -1)};
        bool empty = false;
        for (int p = 0; p < n && !empty; ++p) {
            auto key = std::make_pair(p, local[p]);
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, domain_of(sys.procs[p], obj.automata[p], local[p])).first;
            s.dom.push_back(it->second);
            empty = it->second.empty();
        }
        if (empty) continue;
        s.order.resize(n);
        std::iota(s.order.begin(), s.order.end(), 0);
        std::stable_sort(s.order.begin(), s.order.end(),
                         [&](int x, int y) { return s.dom[x].size() < s.dom[y].size(); });
        if (!s.run(0)) continue;
        PatternCertificate c;
        c.disjunct = d;
        std::vector<PatternEntry> entries;
        for (int p = 0; p < n; ++p) {
            const Item& it = s.dom[p][s.choice[p]];
            c.patterns.push_back(it.pat);
            c.runs.push_back(it.run);
            entries.push_back(entry_of(sys.procs[p], it.run));
        }
        auto comp = check_patterns_compatible(entries, nlocks);
        if (!comp.ok)
            throw std::logic_error("verify_2lss: certificate fails the compatibility check: " +
                                   comp.reason);
        // drop phantom locks from the order witness
        for (int t : comp.order)
            if (t < static_cast<int>(sys_in.locks.size())) c.order.push_back(t);
        Verdict2 v;
        v.yes = true;
        v.certificate = std::move(c);
        return v;
    }
    return {};
}

}  // namespace lss
