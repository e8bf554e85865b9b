#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "lss/formula.hpp"

namespace lss::test {

Process fig1_process(const System& sys, const std::string& name) {
    Process p;
    p.name = name;
    for (int i = 1; i <= 6; ++i) p.add_state(std::to_string(i));
    int t1 = sys.find_lock("t1"), t2 = sys.find_lock("t2");
    int a1 = p.add_action("get_t1", LockOp::get(t1));
    int a2 = p.add_action("get_t2", LockOp::get(t2));
    int a3 = p.add_action("rel_t1", LockOp::rel(t1));
    int a4 = p.add_action("reget_t1", LockOp::get(t1));
    int a5 = p.add_action("rel_t2", LockOp::rel(t2));
    int a6 = p.add_action("reget_t2", LockOp::get(t2));
    p.add_transition(0, a1, 1);
    p.add_transition(1, a2, 2);
    p.add_transition(2, a3, 3);
    p.add_transition(3, a4, 4);
    p.add_transition(4, a5, 5);
    p.add_transition(5, a6, 2);
    return p;
}

System fig1_system(const std::vector<std::string>& names) {
    System sys;
    sys.add_lock("t1");
    sys.add_lock("t2");
    for (const auto& n : names) sys.procs.push_back(fig1_process(sys, n));
    return sys;
}

LocalLasso random_local_lasso(const Process& p, std::mt19937_64& rng, int max_len) {
    // random walk in isolation, then cut a loop between two visits of
    // the same local configuration when one is available
    std::vector<int> word;
    std::vector<std::pair<int, LockSet>> seen{{p.initial, 0}};
    int s = p.initial;
    LockSet held = 0;
    for (int i = 0; i < 2 * max_len; ++i) {
        std::vector<int> moves;
        for (const Edge& e : p.out[s]) {
            const LockOp& op = p.op(e.action);
            if (op.kind == OpKind::Get && has(held, op.lock)) continue;
            if (op.kind == OpKind::Rel && !has(held, op.lock)) continue;
            moves.push_back(static_cast<int>(&e - p.out[s].data()));
        }
        if (moves.empty()) break;
        const Edge& e = p.out[s][moves[rng() % moves.size()]];
        const LockOp& op = p.op(e.action);
        if (op.kind == OpKind::Get) held |= bit(op.lock);
        if (op.kind == OpKind::Rel) held &= ~bit(op.lock);
        s = e.to;
        word.push_back(e.action);
        seen.push_back({s, held});
    }
    std::vector<std::pair<int, int>> cuts;
    for (int i = 0; i <= std::min<int>(max_len, static_cast<int>(word.size())); ++i)
        for (int j = i + 1; j <= std::min<int>(i + max_len, static_cast<int>(word.size())); ++j)
            if (seen[i] == seen[j]) cuts.push_back({i, j});
    LocalLasso l;
    if (!cuts.empty() && rng() % 4 != 0) {
        auto [i, j] = cuts[rng() % cuts.size()];
        l.stem.assign(word.begin(), word.begin() + i);
        l.loop.assign(word.begin() + i, word.begin() + j);
        return l;
    }
    int len = static_cast<int>(rng() % (std::min<int>(max_len, static_cast<int>(word.size())) + 1));
    l.stem.assign(word.begin(), word.begin() + len);
    return l;
}

std::vector<Objective> builtin_objectives(const System& sys) {
    int last = static_cast<int>(sys.procs[0].states.size()) - 1;
    int other = sys.procs.size() > 1 ? 1 : 0;
    return {global_deadlock(sys),
            process_deadlock(sys, 0),
            complement(process_deadlock(sys, other)),
            complement(global_deadlock(sys)),
            local_reach_forever(sys, 0, {last}),
            conjoin(complement(process_deadlock(sys, 0)), process_deadlock(sys, other)),
            universal(sys)};
}

bool brute_force_sat(const Cnf& cnf) {
    int n = 0;
    for (const auto& c : cnf)
        for (int l : c) n = std::max(n, std::abs(l));
    for (unsigned m = 0; m < (1U << n); ++m) {
        bool all = std::all_of(cnf.begin(), cnf.end(), [&](const std::array<int, 3>& c) {
            return std::any_of(c.begin(), c.end(), [&](int l) {
                bool val = (m >> (std::abs(l) - 1)) & 1U;
                return (l > 0) == val;
            });
        });
        if (all) return true;
    }
    return false;
}

bool has_independent_set(const UGraph& g, int k) {
    for (unsigned m = 0; m < (1U << g.vertices); ++m) {
        if (std::popcount(m) != k) continue;
        bool ok = std::none_of(g.edges.begin(), g.edges.end(),
                               [&](auto e) { return ((m >> e.first) & 1U) && ((m >> e.second) & 1U); });
        if (ok) return true;
    }
    return false;
}

std::vector<UGraph> graphs_up_to_iso(int n, int max_degree) {
    std::vector<std::pair<int, int>> slots;
    std::vector<std::vector<int>> slot_of(n, std::vector<int>(n, -1));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) {
            slot_of[u][v] = slot_of[v][u] = static_cast<int>(slots.size());
            slots.push_back({u, v});
        }
    std::vector<std::vector<int>> perms;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));

    std::set<unsigned> canon;
    std::vector<UGraph> out;
    for (unsigned m = 0; m < (1U << slots.size()); ++m) {
        std::vector<int> deg(n, 0);
        bool ok = true;
        for (std::size_t i = 0; i < slots.size() && ok; ++i)
            if ((m >> i) & 1U) ok = ++deg[slots[i].first] <= max_degree && ++deg[slots[i].second] <= max_degree;
        if (!ok) continue;
        unsigned best = m;
        for (const auto& pi : perms) {
            unsigned img = 0;
            for (std::size_t i = 0; i < slots.size(); ++i)
                if ((m >> i) & 1U) img |= 1U << slot_of[pi[slots[i].first]][pi[slots[i].second]];
            best = std::min(best, img);
        }
        if (!canon.insert(best).second) continue;
        UGraph g;
        g.vertices = n;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if ((m >> i) & 1U) g.edges.push_back(slots[i]);
        out.push_back(std::move(g));
    }
    return out;
}

namespace {

Formula random_formula(std::mt19937_64& rng, int states, int depth) {
    int pick = static_cast<int>(rng() % (depth > 0 ? 6 : 3));
    switch (pick) {
        case 0:
        case 1:
        case 2: return Formula::var(static_cast<int>(rng() % states));
        case 3: return !random_formula(rng, states, depth - 1);
        case 4: return random_formula(rng, states, depth - 1) && random_formula(rng, states, depth - 1);
        default: return random_formula(rng, states, depth - 1) || random_formula(rng, states, depth - 1);
    }
}

}  // namespace

Ela random_ela(std::mt19937_64& rng, int max_states, int letters) {
    Ela a;
    int n = 1 + static_cast<int>(rng() % max_states);
    for (int s = 0; s < n; ++s) a.add_state("q" + std::to_string(s));
    for (int l = 0; l < letters; ++l) a.letters.push_back(std::string(1, static_cast<char>('a' + l)));
    int edges = static_cast<int>(rng() % (2 * n * letters + 1));
    for (int i = 0; i < edges; ++i)
        a.add_edge(static_cast<int>(rng() % n), static_cast<int>(rng() % letters), static_cast<int>(rng() % n));
    a.acceptance = random_formula(rng, n, 3);
    return a;
}

bool ela_nonempty_by_enumeration(const Ela& a) {
    const int n = static_cast<int>(a.size());
    std::vector<char> reach(n, 0);
    std::vector<int> stack{a.initial};
    reach[a.initial] = 1;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (auto [l, t] : a.delta[s])
            if (!reach[t]) reach[t] = 1, stack.push_back(t);
    }
    for (unsigned set = 1; set < (1U << n); ++set) {
        bool in_reach = true;
        for (int s = 0; s < n; ++s)
            if (((set >> s) & 1U) && !reach[s]) in_reach = false;
        if (!in_reach) continue;
        // a cycle visits exactly `set` iff the induced subgraph is
        // strongly connected and has at least one edge
        int first = std::countr_zero(set);
        auto closure = [&](bool forward) {
            unsigned seen = 1U << first;
            std::vector<int> st{first};
            while (!st.empty()) {
                int s = st.back();
                st.pop_back();
                for (int u = 0; u < n; ++u) {
                    if (!((set >> u) & 1U) || ((seen >> u) & 1U)) continue;
                    int from = forward ? s : u, to = forward ? u : s;
                    bool edge = std::any_of(a.delta[from].begin(), a.delta[from].end(),
                                            [&](auto e) { return e.second == to; });
                    if (edge) seen |= 1U << u, st.push_back(u);
                }
            }
            return seen;
        };
        if (closure(true) != set || closure(false) != set) continue;
        bool has_edge = false;
        for (int s = 0; s < n; ++s)
            if ((set >> s) & 1U)
                for (auto [l, t] : a.delta[s])
                    if ((set >> t) & 1U) has_edge = true;
        if (!has_edge) continue;
        if (eval(a.acceptance, [&](int s) { return ((set >> s) & 1U) != 0; })) return true;
    }
    return false;
}

bool ela_lasso_replays(const Ela& a, const ElaLasso& l) {
    if (l.loop.empty() || l.stem_states.size() != l.stem.size() + 1 ||
        l.loop_states.size() != l.loop.size() + 1)
        return false;
    if (l.stem_states.front() != a.initial || l.stem_states.back() != l.loop_states.front() ||
        l.loop_states.front() != l.loop_states.back())
        return false;
    auto step_ok = [&](int s, int letter, int t) {
        return std::find(a.delta[s].begin(), a.delta[s].end(), std::make_pair(letter, t)) != a.delta[s].end();
    };
    for (std::size_t i = 0; i < l.stem.size(); ++i)
        if (!step_ok(l.stem_states[i], l.stem[i], l.stem_states[i + 1])) return false;
    for (std::size_t i = 0; i < l.loop.size(); ++i)
        if (!step_ok(l.loop_states[i], l.loop[i], l.loop_states[i + 1])) return false;
    std::set<int> inf(l.loop_states.begin(), l.loop_states.end());
    return eval(a.acceptance, [&](int s) { return inf.count(s) > 0; });
}

}  // namespace lss::test
