#include "lss/ela.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "graph.hpp"
#include "lss/errors.hpp"

namespace lss {

int Ela::add_state(const std::string& name) {
    states.push_back(name);
    delta.emplace_back();
    eps.emplace_back();
    return static_cast<int>(states.size()) - 1;
}

void Ela::add_edge(int from, int letter, int to) {
    auto& v = delta.at(from);
    std::pair<int, int> e{letter, to};
    auto it = std::lower_bound(v.begin(), v.end(), e);
    if (it == v.end() || *it != e) v.insert(it, e);
}

void Ela::add_eps(int from, int to) {
    auto& v = eps.at(from);
    if (std::find(v.begin(), v.end(), to) == v.end()) v.push_back(to);
}

bool Ela::has_eps() const {
    for (const auto& v : eps)
        if (!v.empty()) return true;
    return false;
}

std::vector<int> Ela::successors(int state, int letter) const {
    std::vector<int> r;
    const auto& v = delta[state];
    auto it = std::lower_bound(v.begin(), v.end(), std::pair<int, int>{letter, -1});
    for (; it != v.end() && it->first == letter; ++it) r.push_back(it->second);
    return r;
}

Ela eliminate_epsilon(const Ela& a) {
    if (!a.has_eps()) return a;
    Ela r = a;
    for (auto& v : r.eps) v.clear();
    for (std::size_t s = 0; s < a.size(); ++s) {
        std::vector<char> seen(a.size(), 0);
        std::deque<int> todo{static_cast<int>(s)};
        seen[s] = 1;
        while (!todo.empty()) {
            int u = todo.front();
            todo.pop_front();
            for (auto [l, t] : a.delta[u]) r.add_edge(static_cast<int>(s), l, t);
            for (int w : a.eps[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    todo.push_back(w);
                }
        }
    }
    return r;
}

Ela product(const std::vector<const Ela*>& parts_in, std::size_t budget,
            std::vector<std::vector<int>>* tuples_out) {
    if (parts_in.empty()) throw InputError("product of no automata");
    std::vector<Ela> parts;
    for (const Ela* p : parts_in) {
        if (p->letters != parts_in[0]->letters)
            throw InputError("product: alphabet mismatch");
        parts.push_back(eliminate_epsilon(*p));
    }
    const std::size_t k = parts.size();
    const int nletters = static_cast<int>(parts[0].letters.size());

    Ela r;
    r.letters = parts[0].letters;
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> tuples;
    auto intern = [&](const std::vector<int>& t) {
        auto [it, fresh] = index.emplace(t, static_cast<int>(tuples.size()));
        if (fresh) {
            if (tuples.size() >= budget)
                throw BudgetExceeded("product exceeds " + std::to_string(budget) + " states");
            tuples.push_back(t);
            std::string name = "(";
            for (std::size_t i = 0; i < k; ++i) {
                if (i) name += ",";
                name += parts[i].states[t[i]];
            }
            r.add_state(name + ")");
        }
        return it->second;
    };
    std::vector<int> init;
    for (const auto& p : parts) init.push_back(p.initial);
    r.initial = intern(init);
    for (std::size_t cur = 0; cur < tuples.size(); ++cur) {
        for (int l = 0; l < nletters; ++l) {
            std::vector<std::vector<int>> succ(k);
            bool dead = false;
            for (std::size_t i = 0; i < k && !dead; ++i) {
                succ[i] = parts[i].successors(tuples[cur][i], l);
                dead = succ[i].empty();
            }
            if (dead) continue;
            std::vector<std::size_t> pos(k, 0);
            while (true) {
                std::vector<int> t(k);
                for (std::size_t i = 0; i < k; ++i) t[i] = succ[i][pos[i]];
                int id = intern(t);
                r.add_edge(static_cast<int>(cur), l, id);
                std::size_t i = 0;
                while (i < k && ++pos[i] == succ[i].size()) pos[i++] = 0;
                if (i == k) break;
            }
        }
    }
    std::vector<Formula> acc;
    for (std::size_t i = 0; i < k; ++i) {
        acc.push_back(map_atoms(parts[i].acceptance, [&](int s) {
            std::vector<Formula> d;
            for (std::size_t q = 0; q < tuples.size(); ++q)
                if (tuples[q][i] == s) d.push_back(Formula::var(static_cast<int>(q)));
            return Formula::disj(std::move(d));
        }));
    }
    r.acceptance = Formula::conj(std::move(acc));
    if (tuples_out) *tuples_out = std::move(tuples);
    return r;
}

Ela restrict_to(const Ela& a, const std::vector<char>& keep) {
    Ela r;
    r.letters = a.letters;
    if (!keep[a.initial]) {
        r.add_state("empty");
        r.acceptance = Formula::falsity();
        return r;
    }
    std::vector<int> id(a.size(), -1);
    for (std::size_t s = 0; s < a.size(); ++s)
        if (keep[s]) id[s] = r.add_state(a.states[s]);
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (id[s] < 0) continue;
        for (auto [l, t] : a.delta[s])
            if (id[t] >= 0) r.add_edge(id[s], l, id[t]);
        if (!a.eps.empty())
            for (int t : a.eps[s])
                if (id[t] >= 0) r.add_eps(id[s], id[t]);
    }
    r.initial = id[a.initial];
    r.acceptance = map_atoms(a.acceptance, [&](int s) {
        return id[s] < 0 ? Formula::falsity() : Formula::var(id[s]);
    });
    return r;
}

namespace {

// Shortest path a -> b inside `allowed`; at least one step when a == b.
bool bfs_path(const Ela& a, const std::vector<char>& allowed, int from, int to,
              std::vector<int>& letters, std::vector<int>& states) {
    const int n = static_cast<int>(a.size());
    std::vector<int> par(n, -2), plet(n, -1);
    std::deque<int> todo;
    auto push_succ = [&](int u) {
        for (auto [l, t] : a.delta[u])
            if (allowed[t] && par[t] == -2) {
                par[t] = u;
                plet[t] = l;
                todo.push_back(t);
            }
    };
    push_succ(from);
    while (!todo.empty() && par[to] == -2) {
        int u = todo.front();
        todo.pop_front();
        push_succ(u);
    }
    if (par[to] == -2) return false;
    std::vector<int> ls, ss;
    int cur = to;
    do {
        ls.push_back(plet[cur]);
        ss.push_back(cur);
        cur = par[cur];
    } while (cur != from);
    std::reverse(ls.begin(), ls.end());
    std::reverse(ss.begin(), ss.end());
    letters.insert(letters.end(), ls.begin(), ls.end());
    states.insert(states.end(), ss.begin(), ss.end());
    return true;
}

}  // namespace

std::optional<ElaLasso> find_accepting_lasso(const Ela& in, std::size_t dnf_bound) {
    const Ela a = eliminate_epsilon(in);
    const int n = static_cast<int>(a.size());
    if (n == 0) return std::nullopt;
    std::vector<int> par(n, -2), plet(n, -1), order;
    par[a.initial] = -1;
    std::deque<int> todo{a.initial};
    while (!todo.empty()) {
        int u = todo.front();
        todo.pop_front();
        order.push_back(u);
        for (auto [l, t] : a.delta[u])
            if (par[t] == -2) {
                par[t] = u;
                plet[t] = l;
                todo.push_back(t);
            }
    }
    Dnf dnf = to_dnf(a.acceptance, dnf_bound);
    for (const auto& d : dnf) {
        std::vector<char> active(n, 0);
        for (int u : order) active[u] = 1;
        for (int s : d.neg)
            if (s >= 0 && s < n) active[s] = 0;
        bool pos_ok = true;
        for (int s : d.pos)
            if (s < 0 || s >= n || !active[s]) pos_ok = false;
        if (!pos_ok) continue;
        std::vector<int> comp;
        int ncomp = detail::strongly_connected(
            n, active,
            [&](int v, std::vector<int>& out) {
                for (auto [l, t] : a.delta[v]) out.push_back(t);
            },
            comp);
        std::vector<char> nontrivial(ncomp, 0);
        for (int u : order) {
            if (!active[u]) continue;
            for (auto [l, t] : a.delta[u])
                if (active[t] && comp[t] == comp[u]) nontrivial[comp[u]] = 1;
        }
        int chosen = -1;
        if (!d.pos.empty()) {
            int c = comp[d.pos[0]];
            bool all = nontrivial[c];
            for (int s : d.pos) all = all && comp[s] == c;
            if (all) chosen = c;
        } else {
            for (int u : order)
                if (active[u] && nontrivial[comp[u]]) {
                    chosen = comp[u];
                    break;
                }
        }
        if (chosen < 0) continue;
        std::vector<char> in_comp(n, 0);
        int root = -1;
        for (int u : order)
            if (active[u] && comp[u] == chosen) {
                in_comp[u] = 1;
                if (root < 0) root = u;
            }
        if (!d.pos.empty()) root = d.pos[0];
        ElaLasso l;
        for (int cur = root; cur != a.initial; cur = par[cur]) {
            l.stem.push_back(plet[cur]);
            l.stem_states.push_back(cur);
        }
        l.stem_states.push_back(a.initial);
        std::reverse(l.stem.begin(), l.stem.end());
        std::reverse(l.stem_states.begin(), l.stem_states.end());
        l.loop_states.push_back(root);
        int cur = root;
        for (int s : d.pos) {
            if (s == cur) continue;
            bfs_path(a, in_comp, cur, s, l.loop, l.loop_states);
            cur = s;
        }
        if (cur != root || l.loop.empty()) bfs_path(a, in_comp, cur, root, l.loop, l.loop_states);
        return l;
    }
    return std::nullopt;
}

bool accepts(const Ela& a, const std::vector<int>& stem, const std::vector<int>& loop) {
    if (loop.empty()) throw InputError("accepts: empty loop");
    Ela w;
    w.letters = a.letters;
    const int n = static_cast<int>(stem.size() + loop.size());
    for (int i = 0; i < n; ++i) w.add_state("w" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
        int letter = i < static_cast<int>(stem.size()) ? stem[i] : loop[i - stem.size()];
        int next = i + 1 < n ? i + 1 : static_cast<int>(stem.size());
        w.add_edge(i, letter, next);
    }
    w.initial = 0;
    Ela p = product({&a, &w});
    return find_accepting_lasso(p).has_value();
}

std::vector<int> loop_state_set(const ElaLasso& l) {
    std::vector<int> s = l.loop_states;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

}  // namespace lss
