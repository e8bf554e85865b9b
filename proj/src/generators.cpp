#include "lss/generators.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "lss/errors.hpp"

namespace lss {

namespace {

// Appends a transition with a fresh action name.
void edge(Process& p, int from, const std::string& action, LockOp op, int to) {
    p.add_transition(from, p.add_action(action, op), to);
}

}  // namespace

System philosophers(int n, const std::set<int>& left_handed) {
    if (n < 2) throw InputError("philosophers need n >= 2");
    for (int i : left_handed)
        if (i < 1 || i > n) throw InputError("left-handed index out of range");
    System sys;
    for (int i = 1; i <= n; ++i) sys.add_lock("f" + std::to_string(i));
    for (int i = 1; i <= n; ++i) {
        Process p;
        p.name = "p" + std::to_string(i);
        int first = i - 1, second = i % n;
        if (left_handed.count(i)) std::swap(first, second);
        for (const char* s : {"think", "one", "eat", "put"}) p.add_state(s);
        edge(p, 0, "take_" + sys.locks[first], LockOp::get(first), 1);
        edge(p, 1, "take_" + sys.locks[second], LockOp::get(second), 2);
        edge(p, 2, "drop_" + sys.locks[second], LockOp::rel(second), 3);
        edge(p, 3, "drop_" + sys.locks[first], LockOp::rel(first), 0);
        sys.procs.push_back(std::move(p));
    }
    return sys;
}

System random_system(const RandomParams& prm) {
    if (prm.processes < 0 || prm.states < 1 || prm.locks < 0 || prm.locks > kMaxLocks)
        throw InputError("random: invalid parameters");
    std::mt19937_64 rng(prm.seed);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    System sys;
    for (int t = 0; t < prm.locks; ++t) sys.add_lock("l" + std::to_string(t));
    for (int q = 0; q < prm.processes; ++q) {
        Process p;
        p.name = "P" + std::to_string(q);
        // locks of this process
        std::vector<int> pool(prm.locks);
        for (int t = 0; t < prm.locks; ++t) pool[t] = t;
        std::shuffle(pool.begin(), pool.end(), rng);
        int want = prm.two_lock ? 2 : uni(1, std::max(1, prm.max_locks));
        pool.resize(std::min<int>(want, pool.size()));
        // state identity: held locks in acquisition order (nested) or as a set
        std::vector<std::vector<int>> stack;
        std::map<std::vector<int>, std::vector<int>> by_key;
        auto key_of = [&](std::vector<int> st) {
            if (!prm.nested) std::sort(st.begin(), st.end());
            return st;
        };
        auto new_state = [&](const std::vector<int>& st) {
            int id = p.add_state("s" + std::to_string(p.states.size()));
            stack.push_back(st);
            by_key[key_of(st)].push_back(id);
            return id;
        };
        new_state({});
        int actions = 0;
        for (std::size_t s = 0; s < p.states.size(); ++s) {
            const std::vector<int> st = stack[s];
            std::vector<LockOp> ops{LockOp::nop()};
            for (int t : pool)
                if (std::find(st.begin(), st.end(), t) == st.end()) ops.push_back(LockOp::get(t));
            if (prm.nested) {
                if (!st.empty()) ops.push_back(LockOp::rel(st.back()));
            } else {
                for (int t : st) ops.push_back(LockOp::rel(t));
            }
            int exits = 0;
            while (exits < 3 && coin(exits == 0 ? std::min(1.0, prm.density + 0.35) : prm.density))
                ++exits;
            std::vector<LockOp> chosen;
            if (prm.exclusive && exits > 0) {
                LockOp first = ops[uni(0, static_cast<int>(ops.size()) - 1)];
                if (first.kind == OpKind::Get) {
                    chosen.assign(exits, first);
                } else {
                    for (int i = 0; i < exits; ++i) {
                        LockOp o = ops[uni(0, static_cast<int>(ops.size()) - 1)];
                        if (o.kind == OpKind::Get) o = first;
                        chosen.push_back(o);
                    }
                }
            } else {
                for (int i = 0; i < exits; ++i)
                    chosen.push_back(ops[uni(0, static_cast<int>(ops.size()) - 1)]);
            }
            for (const LockOp& o : chosen) {
                std::vector<int> nst = st;
                if (o.kind == OpKind::Get) nst.push_back(o.lock);
                if (o.kind == OpKind::Rel) nst.erase(std::find(nst.begin(), nst.end(), o.lock));
                auto& same = by_key[key_of(nst)];
                int to;
                bool can_new = static_cast<int>(p.states.size()) < prm.states;
                if (!same.empty() && (!can_new || coin(0.6))) {
                    to = same[uni(0, static_cast<int>(same.size()) - 1)];
                } else if (can_new) {
                    to = new_state(nst);
                } else {
                    continue;
                }
                std::string name = "a" + std::to_string(actions++);
                edge(p, static_cast<int>(s), name, o, to);
            }
        }
        sys.procs.push_back(std::move(p));
    }
    return sys;
}

// ---------------------------------------------------------------- 3SAT gadget

SatInstance gen_3sat(const Cnf& cnf, bool exclusive) {
    if (cnf.empty()) throw InputError("3sat: empty CNF");
    int nvars = 0;
    for (const auto& c : cnf)
        for (int l : c) {
            if (l == 0) throw InputError("3sat: literal 0");
            nvars = std::max(nvars, std::abs(l));
        }
    SatInstance out;
    System& sys = out.sys;
    const int t = sys.add_lock("t");
    const int tp = sys.add_lock("t'");
    std::vector<int> tc, tx(nvars + 1), tnx(nvars + 1);
    for (std::size_t i = 0; i < cnf.size(); ++i) tc.push_back(sys.add_lock("tC" + std::to_string(i + 1)));
    for (int k = 1; k <= nvars; ++k) {
        tx[k] = sys.add_lock("tx" + std::to_string(k));
        tnx[k] = sys.add_lock("tnx" + std::to_string(k));
    }
    auto lit_lock = [&](int l) { return l > 0 ? tx[l] : tnx[-l]; };

    {  // p: get t, then idle forever
        Process p;
        p.name = "p";
        p.add_state("1");
        p.add_state("2");
        edge(p, 0, "get_t", LockOp::get(t), 1);
        edge(p, 1, "idle", LockOp::nop(), 1);
        sys.procs.push_back(std::move(p));
    }
    {  // p': 1 <-> 2 on t, 2 <-> 3 on t' (via 4 in the exclusive variant)
        Process p;
        p.name = "p'";
        for (const char* s : {"1", "2", "3"}) p.add_state(s);
        edge(p, 0, "get_t", LockOp::get(t), 1);
        edge(p, 1, "rel_t", LockOp::rel(t), 0);
        if (exclusive) {
            p.add_state("4");
            edge(p, 1, "pick_t'", LockOp::nop(), 3);
            edge(p, 3, "get_t'", LockOp::get(tp), 2);
        } else {
            edge(p, 1, "get_t'", LockOp::get(tp), 2);
        }
        edge(p, 2, "rel_t'", LockOp::rel(tp), 1);
        sys.procs.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < cnf.size(); ++i) {
        Process p;
        p.name = "pC" + std::to_string(i + 1);
        for (const char* s : {"1", "2", "3"}) p.add_state(s);
        edge(p, 0, "get_tC", LockOp::get(tc[i]), 1);
        edge(p, 1, "get_t'", LockOp::get(tp), 2);
        sys.procs.push_back(std::move(p));
    }
    std::vector<int> literal_procs;
    for (std::size_t i = 0; i < cnf.size(); ++i)
        for (int j = 0; j < 3; ++j) {
            int lk = lit_lock(cnf[i][j]);
            Process p;
            p.name = "pl" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            for (const char* s : {"1", "2", "3"}) p.add_state(s);
            edge(p, 0, "get_tC", LockOp::get(tc[i]), 1);
            edge(p, 1, "rel_tC", LockOp::rel(tc[i]), 0);
            if (exclusive) {
                p.add_state("4");
                edge(p, 1, "pick_lit", LockOp::nop(), 3);
                edge(p, 3, "get_lit", LockOp::get(lk), 2);
            } else {
                edge(p, 1, "get_lit", LockOp::get(lk), 2);
            }
            edge(p, 2, "rel_lit", LockOp::rel(lk), 1);
            literal_procs.push_back(static_cast<int>(sys.procs.size()));
            sys.procs.push_back(std::move(p));
        }
    for (int k = 1; k <= nvars; ++k) {
        Process p;
        p.name = "px" + std::to_string(k);
        p.add_state("init");
        if (exclusive) {
            for (const char* s : {"pos", "neg", "hold_x", "hold_nx"}) p.add_state(s);
            edge(p, 0, "choose_x", LockOp::nop(), 1);
            edge(p, 0, "choose_nx", LockOp::nop(), 2);
            edge(p, 1, "get_x", LockOp::get(tx[k]), 3);
            edge(p, 2, "get_nx", LockOp::get(tnx[k]), 4);
        } else {
            p.add_state("hold_x");
            p.add_state("hold_nx");
            edge(p, 0, "get_x", LockOp::get(tx[k]), 1);
            edge(p, 0, "get_nx", LockOp::get(tnx[k]), 2);
        }
        sys.procs.push_back(std::move(p));
    }
    out.target = 0;
    Objective o = process_deadlock(sys, 0);
    if (exclusive) {
        // p' runs forever
        Objective live = complement(process_deadlock(sys, 1));
        o = conjoin(o, live);
        // no literal process ends padded in its intermediate state 4
        std::vector<Formula> c{o.phi};
        for (int q : literal_procs) {
            const Process& P = sys.procs[q];
            Dfa d = blank_dfa(P);
            int other = d.add_state("other");
            int at4 = d.add_state("at4");
            int stuck = d.add_state("stuck");
            int pick = P.find_action("pick_lit");
            for (int a = 0; a + 1 < d.letters; ++a) {
                d.delta[other][a] = a == pick ? at4 : other;
                d.delta[at4][a] = other;
                d.delta[stuck][a] = stuck;
            }
            d.delta[other][d.pad_letter()] = other;
            d.delta[at4][d.pad_letter()] = stuck;
            d.delta[stuck][d.pad_letter()] = stuck;
            o.automata[q] = std::move(d);
            c.push_back(!Formula::var(inf_atom(q, stuck)));
        }
        o.phi = Formula::conj(std::move(c));
    }
    out.objective = std::move(o);
    return out;
}

// ---------------------------------------------------------------- independent set

int max_branch_locks(const UGraph& g) {
    std::vector<int> deg(g.vertices, 0);
    for (auto [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    int m = 0;
    for (int d : deg) m = std::max(m, std::max(d, 1));
    return m + 2;
}

IndsetInstance gen_indset(const UGraph& g_in, int k) {
    if (k < 1 || k > g_in.vertices) throw InputError("indset: need 1 <= k <= |V|");
    for (auto [u, v] : g_in.edges)
        if (u < 0 || v < 0 || u >= g_in.vertices || v >= g_in.vertices || u == v)
            throw InputError("indset: malformed edge");
    UGraph g = g_in;
    if (k == 1) {
        ++g.vertices;
        k = 2;
    }
    IndsetInstance out;
    out.k = k;
    System& sys = out.sys;
    const int m = static_cast<int>(g.edges.size());
    for (int j = 0; j < m; ++j) sys.add_lock("t" + std::to_string(j + 1));
    // an isolated vertex gets a private lock so that two processes cannot
    // both pick it
    std::vector<int> deg(g.vertices, 0), own(g.vertices, -1);
    for (auto [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    for (int v = 0; v < g.vertices; ++v)
        if (deg[v] == 0) own[v] = sys.add_lock("u" + std::to_string(v + 1));
    std::vector<int> ell;
    for (int i = 0; i < k; ++i) ell.push_back(sys.add_lock("l" + std::to_string(i + 1)));
    for (int i = 0; i < k; ++i) {
        Process p;
        p.name = "p" + std::to_string(i + 1);
        p.add_state("init");
        int end = p.add_state("end");
        edge(p, end, "loop", LockOp::nop(), end);
        for (int v = 0; v < g.vertices; ++v) {
            std::string vn = "v" + std::to_string(v + 1);
            int cur = p.add_state(vn);
            edge(p, 0, "choose_" + vn, LockOp::nop(), cur);
            std::vector<int> seq;
            for (int j = 0; j < m; ++j)
                if (g.edges[j].first == v || g.edges[j].second == v) seq.push_back(j);
            if (own[v] >= 0) seq.push_back(own[v]);
            seq.push_back(ell[i]);
            seq.push_back(ell[(i + 1) % k]);
            for (std::size_t x = 0; x < seq.size(); ++x) {
                int nxt = p.add_state(vn + ".got" + std::to_string(x + 1));
                edge(p, cur, vn + ".get_" + sys.locks[seq[x]], LockOp::get(seq[x]), nxt);
                cur = nxt;
            }
            for (std::size_t x = seq.size(); x-- > 0;) {
                int nxt = x == 0 ? end : p.add_state(vn + ".put" + std::to_string(x));
                edge(p, cur, vn + ".rel_" + sys.locks[seq[x]], LockOp::rel(seq[x]), nxt);
                cur = nxt;
            }
        }
        sys.procs.push_back(std::move(p));
    }
    return out;
}

}  // namespace lss
