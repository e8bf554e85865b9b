#include "lss/nestedpat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "graph.hpp"
#include "lss/errors.hpp"

namespace lss {

std::string to_string(const StairPattern& p, const System& sys) {
    std::string s = "owns=(";
    for (std::size_t i = 0; i < p.owns_seq.size(); ++i)
        s += (i ? "," : "") + sys.locks[p.owns_seq[i]];
    s += ") inf={";
    bool first = true;
    for (int t : members(p.inf_set)) {
        s += (first ? "" : ",") + sys.locks[t];
        first = false;
    }
    return s + "}";
}

// ---------------------------------------------------------------- decomposition

namespace {

void check_lifo(const Process& p, const LocalLasso& run) {
    std::vector<int> word = run.stem;
    if (!run.loop.empty()) {
        int reps = popcount(p.locks()) + 2;
        for (int r = 0; r < reps; ++r) word.insert(word.end(), run.loop.begin(), run.loop.end());
    }
    std::vector<int> stack;
    for (std::size_t i = 0; i < word.size(); ++i) {
        const LockOp& o = p.op(word[i]);
        if (o.kind == OpKind::Get) stack.push_back(o.lock);
        if (o.kind == OpKind::Rel) {
            if (stack.empty() || stack.back() != o.lock)
                throw InputError("run is not nested at index " + std::to_string(i));
            stack.pop_back();
        }
    }
}

bool releases(const Process& p, const std::vector<int>& w, std::size_t from, int lock) {
    for (std::size_t i = from; i < w.size(); ++i) {
        const LockOp& o = p.op(w[i]);
        if (o.kind == OpKind::Rel && o.lock == lock) return true;
    }
    return false;
}

}  // namespace

StairDecomposition stair_decompose(const Process& p, const LocalLasso& in) {
    validate_local_lasso(p, in);
    check_lifo(p, in);
    StairDecomposition d;
    d.run = in;
    LocalLasso& run = d.run;
    LockSet stairs = 0;
    for (std::size_t i = 0; i < run.stem.size(); ++i) {
        const LockOp& o = p.op(run.stem[i]);
        if (o.kind == OpKind::Get && !releases(p, run.stem, i + 1, o.lock) &&
            !releases(p, run.loop, 0, o.lock))
            stairs |= bit(o.lock);
    }
    if (!run.loop.empty()) {
        std::vector<int> all = run.stem;
        all.insert(all.end(), run.loop.begin(), run.loop.end());
        auto tr = execute_local(p, all);
        std::size_t j = 0;
        while (j <= run.loop.size() && tr[run.stem.size() + j].held != stairs) ++j;
        if (j > run.loop.size()) throw InputError("stair decomposition: loop never returns to the stair locks");
        if (j > 0 && j < run.loop.size()) {
            std::vector<int> head(run.loop.begin(), run.loop.begin() + j);
            run.stem.insert(run.stem.end(), head.begin(), head.end());
            std::rotate(run.loop.begin(), run.loop.begin() + j, run.loop.end());
        }
    }
    d.segments.emplace_back();
    std::set<std::pair<int, int>> cons;
    for (std::size_t i = 0; i < run.stem.size(); ++i) {
        int a = run.stem[i];
        const LockOp& o = p.op(a);
        if (o.kind == OpKind::Get && has(stairs, o.lock) && !releases(p, run.stem, i + 1, o.lock)) {
            d.stairs.push_back(a);
            d.stair_locks.push_back(o.lock);
            d.segments.emplace_back();
            auto note = [&](int x) {
                const LockOp& q = p.op(x);
                if (q.kind != OpKind::Nop && q.lock != o.lock) cons.emplace(o.lock, q.lock);
            };
            for (std::size_t j = i + 1; j < run.stem.size(); ++j) note(run.stem[j]);
            for (int x : run.loop) note(x);
        } else {
            d.segments.back().push_back(a);
        }
    }
    d.constraints.assign(cons.begin(), cons.end());
    for (std::size_t i = 0; i < run.loop.size();) {
        const LockOp& o = p.op(run.loop[i]);
        std::size_t j = i + 1;
        if (o.kind == OpKind::Get) {
            d.minimal.inf_set |= bit(o.lock);
            while (j < run.loop.size() &&
                   !(p.op(run.loop[j]).kind == OpKind::Rel && p.op(run.loop[j]).lock == o.lock))
                ++j;
            ++j;
        }
        d.tail.emplace_back(run.loop.begin() + i, run.loop.begin() + std::min(j, run.loop.size()));
        i = j;
    }
    for (int x : run.loop)
        if (p.op(x).kind == OpKind::Get) d.minimal.inf_set |= bit(p.op(x).lock);
    d.minimal.owns_seq = d.stair_locks;
    return d;
}

// ---------------------------------------------------------------- pattern automaton

Ela build_stair_pattern_ela(const Process& p, const StairPattern& pat, const std::vector<int>& order) {
    const std::vector<int> locks = members(p.locks());
    const int nl = static_cast<int>(locks.size());
    std::map<int, int> rank, slot;
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    for (int i = 0; i < nl; ++i) {
        if (!rank.count(locks[i])) throw InputError("stair pattern: order misses a lock of " + p.name);
        slot[locks[i]] = i + 1;
    }
    const std::vector<int>& st = pat.owns_seq;
    const int k = static_cast<int>(st.size());
    for (int i = 0; i < k; ++i) {
        if (!slot.count(st[i])) throw InputError("stair pattern: owned lock outside the process");
        if (i > 0 && rank[st[i - 1]] >= rank[st[i]])
            throw InputError("stair pattern: owned locks not increasing in the order");
    }
    Ela e;
    e.letters = padded_letters(p);
    const LockSet inf = pat.inf_set & p.locks();
    for (int t : locks)
        for (int u : locks)
            if (has(inf, t) && !has(inf, u) && rank[t] < rank[u]) {
                e.add_state("empty");
                e.acceptance = Formula::falsity();
                return e;
            }
    const int width = nl + 1;
    auto id = [&](int i, int x) { return i * width + x; };  // i = k + 1 is the periodic part
    for (int i = 0; i <= k + 1; ++i)
        for (int x = 0; x < width; ++x) {
            std::string lvl = i == k + 1 ? "inf" : std::to_string(i);
            e.add_state("(" + lvl + "," + (x == 0 ? std::string("neutral") : "t" + std::to_string(locks[x - 1])) + ")");
        }
    auto above = [&](int i, int t) { return i == 0 || rank[t] > rank[st[i - 1]]; };
    const int pad = static_cast<int>(p.actions.size());
    const int top = k + 1;
    for (int a = 0; a < pad; ++a) {
        const LockOp& o = p.op(a);
        if (o.kind == OpKind::Nop) {
            for (int s = 0; s < static_cast<int>(e.size()); ++s) e.add_edge(s, a, s);
            continue;
        }
        const int t = o.lock;
        for (int i = 0; i <= k; ++i) {
            if (o.kind == OpKind::Get) {
                if (i < k && t == st[i]) e.add_edge(id(i, 0), a, id(i + 1, 0));
                if (above(i, t)) e.add_edge(id(i, 0), a, id(i, slot[t]));
            }
            for (int x = 1; x < width; ++x) {
                if (o.kind == OpKind::Rel && t == locks[x - 1])
                    e.add_edge(id(i, x), a, id(i, 0));
                else if (above(i, t))
                    e.add_edge(id(i, x), a, id(i, x));
            }
        }
        if (!has(inf, t)) continue;
        if (o.kind == OpKind::Get) e.add_edge(id(top, 0), a, id(top, slot[t]));
        for (int x = 1; x < width; ++x) {
            if (o.kind == OpKind::Rel && t == locks[x - 1])
                e.add_edge(id(top, x), a, id(top, 0));
            else
                e.add_edge(id(top, x), a, id(top, x));
        }
    }
    e.add_edge(id(k, 0), pad, id(top, 0));
    e.add_edge(id(top, 0), pad, id(top, 0));
    e.add_eps(id(k, 0), id(top, 0));
    e.initial = id(0, 0);
    e.acceptance = Formula::var(id(top, 0));
    return eliminate_epsilon(e);
}

// ---------------------------------------------------------------- criterion

StairEntry stair_entry_of(const Process& p, const LocalLasso& run) {
    StairDecomposition d = stair_decompose(p, run);
    StairEntry e;
    e.pattern = d.minimal;
    e.constraints = d.constraints;
    e.finite = run.finite();
    if (e.finite) {
        int s = execute_local(p, run.stem).back().state;
        e.end_gets_only = p.all_get_in(s, ~LockSet{0});
        e.end_gets = p.gettable(s);
    }
    return e;
}

StairCompatibility check_stair_compatible(const std::vector<StairEntry>& es, const std::vector<int>& order) {
    auto fail = [](int c, std::string why) { return StairCompatibility{false, c, std::move(why)}; };
    LockSet owned = 0, inf = 0;
    for (std::size_t p = 0; p < es.size(); ++p) {
        LockSet mine = 0;
        for (int t : es[p].pattern.owns_seq) mine |= bit(t);
        if (owned & mine) return fail(1, "owned locks of process " + std::to_string(p) + " overlap another's");
        owned |= mine;
        inf |= es[p].pattern.inf_set;
    }
    std::map<int, int> rank;
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
    auto below = [&](int a, int b) {
        if (!rank.count(a) || !rank.count(b)) throw InputError("stair order misses a lock");
        return rank[a] < rank[b];
    };
    for (std::size_t p = 0; p < es.size(); ++p) {
        const auto& seq = es[p].pattern.owns_seq;
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (!below(seq[i - 1], seq[i]))
                return fail(2, "owned locks of process " + std::to_string(p) + " against the order");
        for (auto [a, b] : es[p].constraints)
            if (!below(a, b)) return fail(2, "run of process " + std::to_string(p) + " uses a lock below a stair");
    }
    for (std::size_t p = 0; p < es.size(); ++p)
        if (es[p].finite && (!es[p].end_gets_only || (es[p].end_gets & ~owned) != 0))
            return fail(3, "finite run of process " + std::to_string(p) + " can still move");
    if (owned & inf) return fail(4, "a lock is both kept forever and used infinitely often");
    return {};
}

std::vector<int> stair_order(const std::vector<StairEntry>& es, int nlocks) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : es) {
        edges.insert(edges.end(), e.constraints.begin(), e.constraints.end());
        for (std::size_t i = 1; i < e.pattern.owns_seq.size(); ++i)
            edges.emplace_back(e.pattern.owns_seq[i - 1], e.pattern.owns_seq[i]);
    }
    return detail::topo_order(nlocks, edges);
}

// ---------------------------------------------------------------- search

namespace {

constexpr std::size_t kAssignmentCap = 200'000;

/// One way for a process to realise its owned locks: the stair order,
/// the order edges it imposes on owned locks, and a witness run.
struct Option {
    std::vector<int> stairs;
    std::vector<std::pair<int, int>> edges;
    LocalLasso run;
};

LocalLasso to_local(const ElaLasso& l, int pad) {
    LocalLasso r;
    for (int x : l.stem) {
        if (x == pad) return r;
        r.stem.push_back(x);
    }
    if (std::find(l.loop.begin(), l.loop.end(), pad) != l.loop.end()) {
        for (int x : l.loop) {
            if (x == pad) break;
            r.stem.push_back(x);
        }
        return r;
    }
    r.loop = l.loop;
    return r;
}

/// Product of `base` with the pattern automaton for a fixed stair order
/// in which the other owned locks are not placed yet: each state records,
/// per such lock, the highest stair level at which the run operated on it.
struct SlotProduct {
    Ela ela;
    std::vector<std::vector<int>> level;  // per state, per foreign lock
};

SlotProduct slot_product(const Process& P, const Ela& base, const std::vector<int>& stairs,
                         const std::vector<int>& foreign, LockSet inf) {
    const int k = static_cast<int>(stairs.size());
    const int top = k + 1;
    const int pad = static_cast<int>(P.actions.size());
    std::map<int, int> stair_at, foreign_at;
    for (int i = 0; i < k; ++i) stair_at[stairs[i]] = i;
    for (std::size_t f = 0; f < foreign.size(); ++f) foreign_at[foreign[f]] = static_cast<int>(f);
    SlotProduct sp;
    Ela& e = sp.ela;
    e.letters = padded_letters(P);
    // base state, level (top = periodic part), open lock (-1 neutral), slots
    using Key = std::tuple<int, int, int, std::vector<int>>;
    std::map<Key, int> index;
    std::vector<Key> keys;
    auto intern = [&](const Key& key) {
        auto [it, fresh] = index.emplace(key, static_cast<int>(keys.size()));
        if (fresh) {
            if (keys.size() >= 2'000'000) throw BudgetExceeded("stair pattern product too large");
            keys.push_back(key);
            e.add_state("");
            sp.level.push_back(std::get<3>(key));
        }
        return it->second;
    };
    // pattern moves for one letter from (i, x, m)
    auto moves = [&](int a, int i, int x, const std::vector<int>& m, std::vector<std::tuple<int, int, std::vector<int>>>& out) {
        out.clear();
        if (a == pad) {
            if (x < 0 && (i == k || i == top)) out.emplace_back(top, -1, m);
            return;
        }
        const LockOp& o = P.op(a);
        if (o.kind == OpKind::Nop) {
            out.emplace_back(i, x, m);
            return;
        }
        const int t = o.lock;
        if (i == top) {
            if (!has(inf, t)) return;
            if (x < 0 && o.kind == OpKind::Get) out.emplace_back(top, t, m);
            if (x >= 0) out.emplace_back(top, o.kind == OpKind::Rel && t == x ? -1 : x, m);
            return;
        }
        auto st = stair_at.find(t);
        bool allowed = st == stair_at.end() || st->second >= i;
        std::vector<int> m2 = m;
        if (auto f = foreign_at.find(t); f != foreign_at.end()) m2[f->second] = std::max(m2[f->second], i);
        if (x < 0) {
            if (o.kind != OpKind::Get) return;
            if (i < k && t == stairs[i]) out.emplace_back(i + 1, -1, m);
            if (allowed) out.emplace_back(i, t, m2);
        } else if (o.kind == OpKind::Rel && t == x) {
            out.emplace_back(i, -1, m2);
        } else if (allowed) {
            out.emplace_back(i, x, m2);
        }
    };
    e.initial = intern({base.initial, 0, -1, std::vector<int>(foreign.size(), 0)});
    std::vector<std::tuple<int, int, std::vector<int>>> next;
    for (std::size_t cur = 0; cur < keys.size(); ++cur) {
        const auto [b, i, x, m] = keys[cur];
        const int from = static_cast<int>(cur);
        // the epsilon move from (k, neutral) to the periodic part is folded in
        std::vector<std::pair<int, int>> srcs{{i, x}};
        if (i == k && x < 0) srcs.emplace_back(top, -1);
        for (auto [si, sx] : srcs)
            for (auto [letter, bt] : base.delta[b]) {
                moves(letter, si, sx, m, next);
                for (auto& [ni, nx, nm] : next) e.add_edge(from, letter, intern({bt, ni, nx, nm}));
            }
    }
    std::vector<Formula> acc;
    for (std::size_t q = 0; q < keys.size(); ++q)
        if (std::get<1>(keys[q]) == top && std::get<2>(keys[q]) < 0) acc.push_back(Formula::var(static_cast<int>(q)));
    Formula lifted = map_atoms(base.acceptance, [&](int s) {
        std::vector<Formula> d;
        for (std::size_t q = 0; q < keys.size(); ++q)
            if (std::get<0>(keys[q]) == s) d.push_back(Formula::var(static_cast<int>(q)));
        return Formula::disj(std::move(d));
    });
    e.acceptance = Formula::disj(std::move(acc)) && lifted;
    return sp;
}

/// Options of p owning exactly `mine` when `owned` is the set of all
/// locks kept forever. `base` is p's automaton (with PAD loops and the
/// objective constraints already multiplied in). For every stair order,
/// each other owned lock f only needs a lower bound (the highest stair
/// level at which f is used); the minimal feasible bound vectors are
/// collected.
std::vector<Option> options_of(const Process& P, const Ela& base, LockSet mine, LockSet owned,
                               bool& truncated) {
    const LockSet tp = P.locks();
    std::vector<int> stairs = members(mine);
    const std::vector<int> foreign = members(tp & owned & ~mine);
    const bool permissive = stairs.size() > 6;
    truncated = truncated || permissive;
    std::vector<Option> out;
    const int pad = static_cast<int>(P.actions.size());
    auto leq = [](const std::vector<int>& a, const std::vector<int>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] > b[i]) return false;
        return true;
    };
    do {
        SlotProduct sp = slot_product(P, base, stairs, foreign, tp & ~owned);
        std::set<std::pair<int, std::vector<int>>> cands;
        for (const auto& m : sp.level) cands.emplace(std::accumulate(m.begin(), m.end(), 0), m);
        std::vector<std::vector<int>> found;
        for (const auto& [sum, m] : cands) {
            bool dominated = false;
            for (const auto& f : found) dominated = dominated || leq(f, m);
            if (dominated) continue;
            std::vector<char> keep(sp.level.size());
            for (std::size_t q = 0; q < keep.size(); ++q) keep[q] = leq(sp.level[q], m);
            auto l = find_accepting_lasso(restrict_to(sp.ela, keep));
            if (!l) continue;
            // slots along the run are at most m, and every smaller candidate
            // was refuted before, so m is a minimal feasible vector
            found.push_back(m);
            Option o{stairs, {}, to_local(*l, pad)};
            for (std::size_t i = 1; i < stairs.size(); ++i) o.edges.emplace_back(stairs[i - 1], stairs[i]);
            for (std::size_t f = 0; f < foreign.size(); ++f)
                if (m[f] > 0) o.edges.emplace_back(stairs[m[f] - 1], foreign[f]);
            out.push_back(std::move(o));
        }
    } while (!permissive && std::next_permutation(stairs.begin(), stairs.end()));
    return out;
}

/// Picks one option per process with an acyclic union of order edges.
struct OrderCsp {
    int nlocks;
    std::vector<const std::vector<Option>*> dom;
    std::vector<int> choice;
    std::vector<int> seq;

    bool run() {
        seq.resize(dom.size());
        std::iota(seq.begin(), seq.end(), 0);
        std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) { return dom[a]->size() < dom[b]->size(); });
        choice.assign(dom.size(), -1);
        return go(0, {});
    }
    bool go(std::size_t i, const std::vector<std::pair<int, int>>& edges) {
        if (i == seq.size()) return true;
        int p = seq[i];
        for (std::size_t c = 0; c < dom[p]->size(); ++c) {
            auto next = edges;
            const auto& add = (*dom[p])[c].edges;
            next.insert(next.end(), add.begin(), add.end());
            if (!add.empty() && nlocks > 0 && detail::topo_order(nlocks, next).empty()) continue;
            choice[p] = static_cast<int>(c);
            if (go(i + 1, next)) return true;
        }
        choice[p] = -1;
        return false;
    }
    std::vector<int> order(LockSet owned) const {
        std::vector<std::pair<int, int>> edges;
        for (std::size_t p = 0; p < dom.size(); ++p) {
            const auto& add = (*dom[p])[choice[p]].edges;
            edges.insert(edges.end(), add.begin(), add.end());
        }
        std::vector<int> all = detail::topo_order(nlocks, edges), out;
        for (int t : all)
            if (has(owned, t)) out.push_back(t);
        for (int t : all)
            if (!has(owned, t)) out.push_back(t);
        return out;
    }
};

SoundReport require_nested(const System& sys) {
    sys.validate();
    SoundReport sr = check_sound(sys);
    if (!sr.sound)
        throw Inapplicable("sound", "system is not sound (process " +
                                        sys.procs[sr.violation->proc].name + ")");
    NestedReport nr = check_nested(sys);
    if (!nr.nested)
        throw Inapplicable("nested", "process " + sys.procs[nr.proc].name + " releases out of order");
    return sr;
}

/// Candidate owned sets of process q: subsets of owns(s), s reachable.
std::vector<LockSet> owned_candidates(const SoundReport& sr, int q) {
    std::set<LockSet> c;
    for (std::size_t s = 0; s < sr.owns[q].size(); ++s) {
        if (!sr.reachable[q][s]) continue;
        LockSet o = sr.owns[q][s];
        for (LockSet sub = o;; sub = (sub - 1) & o) {
            c.insert(sub);
            if (sub == 0) break;
        }
    }
    std::vector<LockSet> v(c.begin(), c.end());
    std::stable_sort(v.begin(), v.end(), [](LockSet a, LockSet b) { return popcount(a) < popcount(b); });
    return v;
}

}  // namespace

VerdictNested verify_nested(const System& sys, const Objective& obj) {
    SoundReport sr = require_nested(sys);
    obj.validate(sys);
    const int n = static_cast<int>(sys.procs.size());
    const int nlocks = static_cast<int>(sys.locks.size());
    std::vector<std::vector<LockSet>> cand(n);
    for (int q = 0; q < n; ++q) cand[q] = owned_candidates(sr, q);
    Dnf dnf = to_dnf(obj.phi);
    bool truncated = false;
    std::size_t assignments = 0;
    std::map<std::tuple<int, std::size_t, LockSet, LockSet>, std::vector<Option>> memo;
    std::map<std::tuple<int, std::size_t, LockSet>, Ela> bases;
    std::map<std::pair<int, Literals>, std::size_t> lit_ids;
    for (std::size_t d = 0; d < dnf.size(); ++d) {
        auto local = split_by_process(dnf[d], n);
        std::vector<std::size_t> lid(n);
        for (int q = 0; q < n; ++q)
            lid[q] = lit_ids.emplace(std::make_pair(q, local[q]), lit_ids.size()).first->second;
        std::vector<LockSet> mine(n, 0);
        std::optional<NestedCertificate> found;
        std::function<void(int, LockSet)> assign = [&](int q, LockSet used) {
            if (found) return;
            if (q < n) {
                for (LockSet s : cand[q]) {
                    if (s & used) continue;
                    mine[q] = s;
                    assign(q + 1, used | s);
                    if (found) return;
                }
                return;
            }
            if (++assignments > kAssignmentCap) throw BudgetExceeded("nested: owned-set assignment cap exceeded");
            const LockSet owned = used;
            OrderCsp csp{nlocks, {}, {}, {}};
            for (int p = 0; p < n; ++p) {
                const Process& P = sys.procs[p];
                const LockSet rel = P.locks() & owned;
                auto key = std::make_tuple(p, lid[p], mine[p], rel);
                auto it = memo.find(key);
                if (it == memo.end()) {
                    auto bkey = std::make_tuple(p, lid[p], rel);
                    auto bt = bases.find(bkey);
                    if (bt == bases.end()) {
                        std::vector<char> pad_ok(P.states.size(), 0);
                        for (std::size_t s = 0; s < P.states.size(); ++s)
                            pad_ok[s] = P.all_get_in(static_cast<int>(s), rel);
                        Ela a = process_ela(P, pad_ok);
                        Ela b = dfa_ela(obj.automata[p], P, local[p]);
                        bt = bases.emplace(bkey, product({&a, &b})).first;
                    }
                    it = memo.emplace(key, options_of(P, bt->second, mine[p], owned, truncated)).first;
                }
                if (it->second.empty()) return;
                csp.dom.push_back(&it->second);
            }
            if (!csp.run()) return;
            NestedCertificate c;
            c.disjunct = d;
            c.order = csp.order(owned);
            for (int p = 0; p < n; ++p) {
                const Option& o = (*csp.dom[p])[csp.choice[p]];
                c.patterns.push_back({o.stairs, sys.procs[p].locks() & ~owned});
                c.runs.push_back(o.run);
            }
            found = std::move(c);
        };
        assign(0, 0);
        if (found) return {true, std::move(found)};
    }
    if (truncated) throw BudgetExceeded("nested: stair orders were truncated and no certificate was found");
    return {};
}

// ---------------------------------------------------------------- circular deadlock

std::optional<CircularDeadlock> detect_circular_deadlock(const System& sys) {
    SoundReport sr = require_nested(sys);
    const int n = static_cast<int>(sys.procs.size());
    const int nlocks = static_cast<int>(sys.locks.size());
    struct Node {
        int proc, state, need;
        LockSet owns;
    };
    std::vector<Node> nodes;
    for (int q = 0; q < n; ++q) {
        const Process& P = sys.procs[q];
        for (std::size_t s = 0; s < P.states.size(); ++s) {
            if (!sr.reachable[q][s] || P.out[s].empty() || sr.owns[q][s] == 0) continue;
            const LockOp& o = P.op(P.out[s].front().action);
            if (o.kind != OpKind::Get || !P.all_get_in(static_cast<int>(s), bit(o.lock))) continue;
            nodes.push_back({q, static_cast<int>(s), o.lock, sr.owns[q][s]});
        }
    }
    bool truncated = false;
    std::size_t checks = 0;
    std::map<std::tuple<int, int, LockSet>, std::vector<Option>> memo;
    std::vector<int> path;
    std::optional<CircularDeadlock> found;

    auto reachable = [&](LockSet owned) {
        if (++checks > kAssignmentCap) throw BudgetExceeded("circular deadlock: cycle cap exceeded");
        OrderCsp csp{nlocks, {}, {}, {}};
        for (int i : path) {
            const Node& v = nodes[i];
            const Process& P = sys.procs[v.proc];
            auto key = std::make_tuple(v.proc, v.state, P.locks() & owned);
            auto it = memo.find(key);
            if (it == memo.end()) {
                std::vector<char> pad_ok(P.states.size(), 0);
                pad_ok[v.state] = 1;
                Ela a = process_ela(P, pad_ok);
                it = memo.emplace(key, options_of(P, a, v.owns, owned, truncated)).first;
            }
            if (it->second.empty()) return false;
            csp.dom.push_back(&it->second);
        }
        if (!csp.run()) return false;
        CircularDeadlock c;
        c.order = csp.order(owned);
        for (std::size_t j = 0; j < path.size(); ++j) {
            const Node& v = nodes[path[j]];
            const Node& prev = nodes[path[(j + path.size() - 1) % path.size()]];
            c.procs.push_back(v.proc);
            c.states.push_back(v.state);
            c.held.push_back(prev.need);
            c.needed.push_back(v.need);
            c.runs.push_back((*csp.dom[j])[csp.choice[j]].run);
        }
        found = std::move(c);
        return true;
    };
    std::function<void(LockSet, LockSet)> extend = [&](LockSet procs, LockSet owned) {
        const Node& start = nodes[path.front()];
        const Node& cur = nodes[path.back()];
        if (path.size() >= 2 && has(start.owns, cur.need) && reachable(owned)) return;
        for (std::size_t i = 0; i < nodes.size() && !found; ++i) {
            const Node& b = nodes[i];
            if (b.proc <= start.proc || has(procs, b.proc) || (b.owns & owned) || !has(b.owns, cur.need)) continue;
            path.push_back(static_cast<int>(i));
            extend(procs | bit(b.proc), owned | b.owns);
            path.pop_back();
        }
    };
    if (n > kMaxLocks) throw InputError("circular deadlock: at most 64 processes supported");
    for (std::size_t i = 0; i < nodes.size() && !found; ++i) {
        path = {static_cast<int>(i)};
        extend(bit(nodes[i].proc), nodes[i].owns);
    }
    if (!found && truncated) throw BudgetExceeded("circular deadlock: stair orders were truncated");
    return found;
}

}  // namespace lss
