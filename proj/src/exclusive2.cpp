#include "lss/exclusive2.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "graph.hpp"
#include "lss/errors.hpp"

namespace lss {

namespace {

void require_sound(const SoundReport& sr) {
    if (!sr.sound)
        throw Inapplicable("sound", "system is not sound (process " +
                                        std::to_string(sr.violation ? sr.violation->proc : -1) + ")");
}

void require_class(const System& sys) {
    ExclusiveReport ex = check_exclusive(sys);
    if (!ex.exclusive)
        throw Inapplicable("exclusive", "process " + sys.procs[ex.proc].name + " state " +
                                            sys.procs[ex.proc].states[ex.state] +
                                            " mixes a Get with another lock operation");
    TwoLockReport tl = check_2lss(sys);
    if (!tl.two_lock)
        throw Inapplicable("2lss", "process " + sys.procs[tl.proc].name + " uses more than two locks");
}

LockGraph graph_of(const System& sys, const SoundReport& sr) {
    LockGraph g;
    g.locks = static_cast<int>(sys.locks.size());
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        for (std::size_t s = 0; s < p.states.size(); ++s) {
            if (!sr.reachable[q][s] || p.out[s].empty()) continue;
            LockSet own = sr.owns[q][s];
            if (popcount(own) != 1) continue;
            const LockOp& first = p.op(p.out[s].front().action);
            if (first.kind != OpKind::Get || !p.all_get_in(s, bit(first.lock))) continue;
            seen.emplace(members(own).front(), first.lock, static_cast<int>(q));
        }
    }
    for (auto [a, b, q] : seen) g.edges.push_back({a, b, q});
    return g;
}

std::vector<ForeverPair> pairs_of(const System& sys, const SoundReport& sr) {
    std::vector<ForeverPair> out;
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        const int n = static_cast<int>(p.states.size());
        for (int t : members(p.locks())) {
            std::vector<char> keep(n, 0);
            bool dead = false;
            for (int s = 0; s < n; ++s) {
                keep[s] = sr.reachable[q][s] && has(sr.owns[q][s], t);
                if (keep[s] && p.out[s].empty()) dead = true;
            }
            std::vector<int> comp;
            auto succ = [&](int v, std::vector<int>& o) {
                for (const Edge& e : p.out[v]) o.push_back(e.to);
            };
            int nc = detail::strongly_connected(n, keep, succ, comp);
            std::vector<int> size(nc, 0);
            for (int s = 0; s < n; ++s)
                if (comp[s] >= 0) ++size[comp[s]];
            bool cycle = false;
            for (int s = 0; s < n && !cycle; ++s) {
                if (comp[s] < 0) continue;
                for (const Edge& e : p.out[s])
                    if (comp[e.to] == comp[s] && (size[comp[s]] > 1 || e.to == s)) cycle = true;
            }
            if (cycle) out.push_back({static_cast<int>(q), t, ForeverKind::InfiniteKeeper});
            if (dead) out.push_back({static_cast<int>(q), t, ForeverKind::DeadHolder});
        }
    }
    return out;
}

/// Shortest path in G from `src` to a lock accepted by `goal`, avoiding
/// `banned`; empty if none.
std::vector<int> bfs(const LockGraph& g, int src, int banned,
                     const std::function<bool(int)>& goal) {
    if (src == banned) return {};
    std::vector<int> parent(g.locks, -2);
    std::deque<int> queue{src};
    parent[src] = -1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (goal(v)) {
            std::vector<int> path;
            for (int x = v; x >= 0; x = parent[x]) path.push_back(x);
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (const LockEdge& e : g.edges)
            if (e.from == v && e.to != banned && parent[e.to] == -2) {
                parent[e.to] = v;
                queue.push_back(e.to);
            }
    }
    return {};
}

/// Locks lying in a strongly connected part of G whose processes can
/// block each other cyclically.
std::vector<char> deadlocking_locks(const LockGraph& g) {
    std::vector<std::vector<int>> succ(g.locks);
    for (const LockEdge& e : g.edges) succ[e.from].push_back(e.to);
    std::vector<int> comp;
    int nc = detail::strongly_connected(
        g.locks, std::vector<char>(g.locks, 1),
        [&](int v, std::vector<int>& o) { o = succ[v]; }, comp);
    std::vector<int> verts(nc, 0);
    std::vector<std::set<std::pair<int, int>>> pairs(nc);
    std::vector<char> good(nc, 0);
    for (int v = 0; v < g.locks; ++v) ++verts[comp[v]];
    for (const LockEdge& e : g.edges) {
        int c = comp[e.from];
        if (c != comp[e.to]) continue;
        pairs[c].emplace(std::min(e.from, e.to), std::max(e.from, e.to));
        bool back = false, other_label = false;
        for (const LockEdge& f : g.edges)
            if (f.from == e.to && f.to == e.from) {
                back = true;
                if (f.proc != e.proc) other_label = true;
            }
        if (!back || other_label) good[c] = 1;
    }
    for (int c = 0; c < nc; ++c)
        if (verts[c] > 1 && pairs[c].size() >= static_cast<std::size_t>(verts[c])) good[c] = 1;
    std::vector<char> out(g.locks, 0);
    for (int v = 0; v < g.locks; ++v) out[v] = good[comp[v]];
    return out;
}

}  // namespace

LockGraph build_lock_graph(const System& sys) {
    SoundReport sr = check_sound(sys);
    require_sound(sr);
    require_class(sys);
    return graph_of(sys, sr);
}

std::vector<ForeverPair> forever_pairs(const System& sys) {
    SoundReport sr = check_sound(sys);
    require_sound(sr);
    return pairs_of(sys, sr);
}

PtimeVerdict process_deadlock_ptime(const System& sys, int proc) {
    if (proc < 0 || proc >= static_cast<int>(sys.procs.size())) throw InputError("no such process");
    SoundReport sr = check_sound(sys);
    require_sound(sr);
    require_class(sys);
    const Process& p = sys.procs[proc];
    PtimeVerdict v;
    for (std::size_t s = 0; s < p.states.size(); ++s)
        if (sr.reachable[proc][s] && p.out[s].empty()) {
            v.yes = true;
            v.condition = "Cx1";
            v.state = static_cast<int>(s);
            return v;
        }
    LockSet wanted = 0;
    for (std::size_t s = 0; s < p.states.size(); ++s)
        if (sr.reachable[proc][s]) wanted |= p.gettable(static_cast<int>(s));
    if (wanted == 0) return v;

    LockGraph g = graph_of(sys, sr);
    std::vector<char> cyc = deadlocking_locks(g);
    for (int t : members(wanted)) {
        auto path = bfs(g, t, -1, [&](int x) { return cyc[x] != 0; });
        if (!path.empty()) {
            v.yes = true;
            v.condition = "Cx2";
            v.lock = t;
            v.path = std::move(path);
            return v;
        }
    }
    std::vector<ForeverPair> fp = pairs_of(sys, sr);
    for (int t : members(wanted)) {
        for (const ForeverPair& f : fp) {
            if (f.proc == proc) continue;
            std::vector<int> path;
            if (f.lock == t) {
                path = {t};
            } else {
                auto feeds = [&](int y) {
                    for (const LockEdge& e : g.edges)
                        if (e.from == y && e.to == f.lock && e.proc != f.proc) return true;
                    return false;
                };
                path = bfs(g, t, f.lock, feeds);
                if (path.empty()) continue;
                path.push_back(f.lock);
            }
            v.yes = true;
            v.condition = f.kind == ForeverKind::InfiniteKeeper ? "Cx3" : "Cx4";
            v.lock = t;
            v.path = std::move(path);
            v.pair = f;
            return v;
        }
    }
    return v;
}

}  // namespace lss
