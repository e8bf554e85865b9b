#include "lss/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>
#include <string>

#include "graph.hpp"
#include "lss/errors.hpp"
#include "state_table.hpp"

namespace lss {

Budget Budget::from_env() {
    Budget b;
    if (const char* env = std::getenv("LSS_BUDGET")) {
        std::string s(env);
        try {
            std::size_t comma = s.find(',');
            b.states = std::stoull(s.substr(0, comma));
            if (comma != std::string::npos) b.transitions = std::stoull(s.substr(comma + 1));
        } catch (const std::exception&) {
            throw InputError("LSS_BUDGET must be 'states[,transitions]', got '" + s + "'");
        }
    }
    return b;
}

namespace {

using Mask = std::uint64_t;

struct Arc {
    int to;
    int proc;
    int action;
};

/// Explicit graph with CSR adjacency and BFS parent pointers.
struct Graph {
    std::vector<std::size_t> first{0};
    std::vector<Arc> arcs;
    std::vector<Arc> parent;  // parent[v].to = predecessor, -1 at the root
    std::vector<Mask> enabled;

    int size() const { return static_cast<int>(first.size()) - 1; }
};

// Stem moves from the root to v.
std::vector<Move> stem_to(const Graph& g, int v) {
    std::vector<Move> r;
    while (g.parent[v].to >= 0) {
        r.push_back({g.parent[v].proc, g.parent[v].action});
        v = g.parent[v].to;
    }
    std::reverse(r.begin(), r.end());
    return r;
}

// BFS path inside component `c` from `from` to the first node satisfying
// `goal` (at least one step when `from` satisfies it and `nonempty`).
template <class Goal>
int walk(const Graph& g, const std::vector<int>& comp, int c, int from, Goal goal, bool nonempty,
         std::vector<Move>& out) {
    if (!nonempty && goal(from)) return from;
    const int n = g.size();
    std::vector<int> par(n, -2);
    std::vector<Arc> via(n);
    std::deque<int> todo{from};
    par[from] = -1;
    int hit = -1;
    while (!todo.empty() && hit < 0) {
        int u = todo.front();
        todo.pop_front();
        for (std::size_t i = g.first[u]; i < g.first[u + 1]; ++i) {
            const Arc& a = g.arcs[i];
            if (comp[a.to] != c) continue;
            if (a.to == from) {
                if (goal(from)) {
                    via[from] = {u, a.proc, a.action};
                    hit = from;
                    break;
                }
                continue;
            }
            if (par[a.to] != -2) continue;
            par[a.to] = u;
            via[a.to] = {u, a.proc, a.action};
            if (goal(a.to)) {
                hit = a.to;
                break;
            }
            todo.push_back(a.to);
        }
    }
    if (hit < 0) throw std::logic_error("walk: target not reachable inside component");
    std::vector<Move> seg;
    int cur = hit;
    do {
        seg.push_back({via[cur].proc, via[cur].action});
        cur = via[cur].to;
    } while (cur != from);
    std::reverse(seg.begin(), seg.end());
    out.insert(out.end(), seg.begin(), seg.end());
    return hit;
}

}  // namespace

OracleResult explore_verify(const System& sys, const Objective& obj, const Budget& budget) {
    sys.validate();
    obj.validate(sys);
    const int n = static_cast<int>(sys.procs.size());
    if (n > 64) throw InputError("oracle supports at most 64 processes");
    const std::size_t width = std::max(1, 2 * n);

    // ------------------------------------------------ product exploration
    detail::StateTable table(width, budget.states);
    Graph g;
    std::vector<std::uint64_t> key(width, 0);
    for (int p = 0; p < n; ++p)
        key[2 * p] = (std::uint64_t(sys.procs[p].initial) << 32) |
                     std::uint32_t(obj.automata[p].initial);
    table.intern(key.data());
    g.parent.push_back({-1, -1, -1});
    for (std::size_t id = 0; id < table.size(); ++id) {
        std::vector<std::uint64_t> cur(table.at(id), table.at(id) + width);
        LockSet busy = 0;
        for (int p = 0; p < n; ++p) busy |= cur[2 * p + 1];
        Mask en = 0;
        for (int p = 0; p < n; ++p) {
            const Process& P = sys.procs[p];
            int s = static_cast<int>(cur[2 * p] >> 32);
            int b = static_cast<int>(cur[2 * p] & 0xffffffffU);
            LockSet held = cur[2 * p + 1];
            for (const Edge& e : P.out[s]) {
                const LockOp& op = P.op(e.action);
                LockSet nh = held;
                if (op.kind == OpKind::Get) {
                    if (has(busy, op.lock)) continue;
                    nh |= bit(op.lock);
                } else if (op.kind == OpKind::Rel) {
                    if (!has(held, op.lock)) continue;
                    nh &= ~bit(op.lock);
                }
                en |= Mask{1} << p;
                key = cur;
                key[2 * p] = (std::uint64_t(e.to) << 32) |
                             std::uint32_t(obj.automata[p].next(b, e.action));
                key[2 * p + 1] = nh;
                auto [to, fresh] = table.intern(key.data());
                if (fresh) g.parent.push_back({static_cast<int>(id), p, e.action});
                g.arcs.push_back({to, p, e.action});
                if (g.arcs.size() > budget.transitions)
                    throw BudgetExceeded("transition budget of " +
                                         std::to_string(budget.transitions) + " exceeded");
            }
        }
        g.enabled.push_back(en);
        g.first.push_back(g.arcs.size());
    }
    const int S = g.size();
    OracleResult res;
    res.states = table.size();
    auto bstate = [&](int v, int p) {
        return static_cast<int>(table.at(v)[2 * p] & 0xffffffffU);
    };

    // ------------------------------------------------ cycle search
    const Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
    Dnf dnf = to_dnf(obj.phi);
    for (const Literals& d : dnf) {
        std::vector<Literals> local = split_by_process(d, n);
        // per (p, B-state): pad valuation ok / state not excluded
        std::vector<std::vector<char>> pad_ok(n), neg_ok(n);
        for (int p = 0; p < n; ++p) {
            const Dfa& B = obj.automata[p];
            pad_ok[p].assign(B.states.size(), 1);
            neg_ok[p].assign(B.states.size(), 1);
            for (std::size_t b = 0; b < B.states.size(); ++b) {
                auto cyc = pad_cycle(B, static_cast<int>(b));
                for (int x : local[p].pos)
                    if (!std::binary_search(cyc.begin(), cyc.end(), x)) pad_ok[p][b] = 0;
                for (int x : local[p].neg)
                    if (std::binary_search(cyc.begin(), cyc.end(), x)) pad_ok[p][b] = 0;
            }
            for (int x : local[p].neg) neg_ok[p][x] = 0;
        }
        std::vector<Mask> lo(S), hi(S);
        std::set<std::pair<Mask, Mask>> shapes;
        for (int v = 0; v < S; ++v) {
            Mask pad = 0, neg = 0;
            for (int p = 0; p < n; ++p) {
                int b = bstate(v, p);
                if (pad_ok[p][b]) pad |= Mask{1} << p;
                if (neg_ok[p][b]) neg |= Mask{1} << p;
            }
            lo[v] = g.enabled[v] | (all & ~pad);
            hi[v] = neg;
            if ((lo[v] & ~hi[v]) == 0) shapes.insert({lo[v], hi[v]});
        }
        std::set<Mask> acting_sets;
        for (auto [l, h] : shapes) {
            Mask free = h & ~l;
            for (Mask sub = free;; sub = (sub - 1) & free) {
                acting_sets.insert(l | sub);
                if (sub == 0) break;
            }
        }
        for (Mask A : acting_sets) {
            std::vector<char> allowed(S, 0);
            bool any = false;
            for (int v = 0; v < S; ++v)
                if ((lo[v] & ~A) == 0 && (A & ~hi[v]) == 0) allowed[v] = any = 1;
            if (!any) continue;
            if (A == 0) {
                for (int v = 0; v < S; ++v)
                    if (allowed[v]) {
                        res.yes = true;
                        res.witness = GlobalLasso{stem_to(g, v), {}};
                        for (int p = 0; p < n; ++p) res.padded.push_back(p);
                        return res;
                    }
            }
            std::vector<int> comp;
            int nc = detail::strongly_connected(
                S, allowed,
                [&](int v, std::vector<int>& out) {
                    for (std::size_t i = g.first[v]; i < g.first[v + 1]; ++i)
                        out.push_back(g.arcs[i].to);
                },
                comp);
            std::vector<Mask> acts(nc, 0);
            for (int v = 0; v < S; ++v) {
                if (!allowed[v]) continue;
                for (std::size_t i = g.first[v]; i < g.first[v + 1]; ++i)
                    if (comp[g.arcs[i].to] == comp[v]) acts[comp[v]] |= Mask{1} << g.arcs[i].proc;
            }
            // coverage of positive atoms of acting processes
            std::vector<int> chosen_root(nc, -1);
            for (int v = 0; v < S; ++v)
                if (allowed[v] && chosen_root[comp[v]] < 0) chosen_root[comp[v]] = v;
            for (int c = 0; c < nc; ++c) {
                if (acts[c] != A) continue;
                std::vector<std::pair<int, int>> need;  // (p, B-state)
                for (int p = 0; p < n; ++p)
                    if ((A >> p) & 1)
                        for (int x : local[p].pos) need.push_back({p, x});
                bool covered = true;
                for (auto [p, x] : need) {
                    bool found = false;
                    for (int v = 0; v < S && !found; ++v)
                        found = comp[v] == c && bstate(v, p) == x;
                    covered = covered && found;
                }
                if (!covered) continue;
                int root = chosen_root[c];
                GlobalLasso l;
                l.stem = stem_to(g, root);
                int cur = root;
                for (int p = 0; p < n; ++p) {
                    if (!((A >> p) & 1)) continue;
                    // reach a state with an internal p-move, then take it
                    cur = walk(g, comp, c, cur, [&](int v) {
                        for (std::size_t i = g.first[v]; i < g.first[v + 1]; ++i)
                            if (g.arcs[i].proc == p && comp[g.arcs[i].to] == c) return true;
                        return false;
                    }, false, l.loop);
                    for (std::size_t i = g.first[cur]; i < g.first[cur + 1]; ++i)
                        if (g.arcs[i].proc == p && comp[g.arcs[i].to] == c) {
                            l.loop.push_back({p, g.arcs[i].action});
                            cur = g.arcs[i].to;
                            break;
                        }
                }
                for (auto [p, x] : need)
                    cur = walk(g, comp, c, cur, [&](int v) { return bstate(v, p) == x; }, false,
                               l.loop);
                if (cur != root) walk(g, comp, c, cur, [&](int v) { return v == root; }, false, l.loop);
                res.yes = true;
                res.witness = std::move(l);
                for (int p = 0; p < n; ++p)
                    if (!((A >> p) & 1)) res.padded.push_back(p);
                return res;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------- scheduling

bool can_schedule(const System& sys, const std::vector<LocalLasso>& runs, const Budget& budget) {
    const int n = static_cast<int>(sys.procs.size());
    if (static_cast<int>(runs.size()) != n) throw InputError("can_schedule: one lasso per process");
    if (n > 64) throw InputError("can_schedule supports at most 64 processes");
    struct Track {
        std::vector<int> acts;
        std::vector<LocalStep> steps;  // steps[i] = configuration before acts[i]
        int stem = 0;
        bool finite = true;
    };
    std::vector<Track> tr(n);
    for (int p = 0; p < n; ++p) {
        const Process& P = sys.procs[p];
        validate_local_lasso(P, runs[p]);
        tr[p].acts = runs[p].stem;
        tr[p].acts.insert(tr[p].acts.end(), runs[p].loop.begin(), runs[p].loop.end());
        tr[p].steps = execute_local(P, tr[p].acts);
        tr[p].stem = static_cast<int>(runs[p].stem.size());
        tr[p].finite = runs[p].finite();
    }
    auto next_pos = [&](int p, int i) {
        int L = static_cast<int>(tr[p].acts.size());
        return i + 1 == L && !tr[p].finite ? tr[p].stem : i + 1;
    };
    const std::size_t width = std::max(1, n);
    detail::StateTable table(width, budget.states);
    std::vector<std::uint64_t> key(width, 0);
    table.intern(key.data());
    Graph g;
    std::vector<char> allowed;
    Mask inf_procs = 0;
    for (int p = 0; p < n; ++p)
        if (!tr[p].finite) inf_procs |= Mask{1} << p;
    for (std::size_t id = 0; id < table.size(); ++id) {
        std::vector<std::uint64_t> cur(table.at(id), table.at(id) + width);
        LockSet busy = 0;
        for (int p = 0; p < n; ++p) busy |= tr[p].steps[cur[p]].held;
        bool ok = true;
        for (int p = 0; p < n && ok; ++p) {
            if (!tr[p].finite) continue;
            int i = static_cast<int>(cur[p]);
            if (i < static_cast<int>(tr[p].acts.size())) {
                ok = false;
                break;
            }
            const Process& P = sys.procs[p];
            for (const Edge& e : P.out[tr[p].steps[i].state]) {
                const LockOp& op = P.op(e.action);
                bool fires = op.kind == OpKind::Nop ||
                             (op.kind == OpKind::Get && !has(busy, op.lock)) ||
                             (op.kind == OpKind::Rel && has(tr[p].steps[i].held, op.lock));
                if (fires) ok = false;
            }
        }
        allowed.push_back(ok);
        if (ok && inf_procs == 0) return true;
        for (int p = 0; p < n; ++p) {
            int i = static_cast<int>(cur[p]);
            if (i >= static_cast<int>(tr[p].acts.size())) continue;
            const LockOp& op = sys.procs[p].op(tr[p].acts[i]);
            if (op.kind == OpKind::Get && has(busy, op.lock)) continue;
            key = cur;
            key[p] = static_cast<std::uint64_t>(next_pos(p, i));
            auto [to, fresh] = table.intern(key.data());
            (void)fresh;
            g.arcs.push_back({to, p, tr[p].acts[i]});
            if (g.arcs.size() > budget.transitions)
                throw BudgetExceeded("transition budget exceeded");
        }
        g.first.push_back(g.arcs.size());
    }
    const int S = g.size();
    std::vector<int> comp;
    int nc = detail::strongly_connected(
        S, allowed,
        [&](int v, std::vector<int>& out) {
            for (std::size_t i = g.first[v]; i < g.first[v + 1]; ++i) out.push_back(g.arcs[i].to);
        },
        comp);
    std::vector<Mask> acts(nc, 0);
    for (int v = 0; v < S; ++v) {
        if (!allowed[v]) continue;
        for (std::size_t i = g.first[v]; i < g.first[v + 1]; ++i)
            if (comp[g.arcs[i].to] == comp[v]) acts[comp[v]] |= Mask{1} << g.arcs[i].proc;
    }
    for (int c = 0; c < nc; ++c)
        if ((acts[c] & inf_procs) == inf_procs) return true;
    return false;
}

bool is_process_fair(const System& sys, const GlobalLasso& l) {
    std::vector<Move> all = l.stem;
    all.insert(all.end(), l.loop.begin(), l.loop.end());
    std::vector<GlobalConfig> trace;
    try {
        trace = execute(sys, all);
    } catch (const InputError&) {
        return false;
    }
    const std::size_t k = l.stem.size();
    if (!l.loop.empty() && !(trace[k] == trace.back())) return false;
    const int n = static_cast<int>(sys.procs.size());
    std::vector<char> acts(n, 0);
    for (const Move& m : l.loop) acts[m.proc] = 1;
    std::size_t last = l.loop.empty() ? k : trace.size() - 1;
    for (int p = 0; p < n; ++p) {
        if (acts[p]) continue;
        for (std::size_t i = k; i <= last; ++i)
            if (process_enabled(sys, trace[i], p)) return false;
    }
    return true;
}

bool lasso_satisfies(const System& sys, const GlobalLasso& l, const Objective& obj) {
    std::vector<Move> all = l.stem;
    all.insert(all.end(), l.loop.begin(), l.loop.end());
    execute(sys, all);
    std::vector<std::vector<int>> rec(sys.procs.size());
    for (std::size_t p = 0; p < sys.procs.size(); ++p)
        rec[p] = recurrent_states(obj.automata[p], project(l.stem, static_cast<int>(p)),
                                  project(l.loop, static_cast<int>(p)));
    return eval(obj.phi, [&](int a) {
        const auto& r = rec.at(atom_proc(a));
        return std::binary_search(r.begin(), r.end(), atom_state(a));
    });
}

}  // namespace lss
