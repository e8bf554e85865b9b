#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

namespace lss::detail {

/// Tarjan's algorithm, iterative. Nodes with active[v] == 0 are ignored
/// and get component -1; `succ(v, out)` fills the successors of v.
/// Returns the component index of every node and the component count.
inline int strongly_connected(int n, const std::vector<char>& active,
                              const std::function<void(int, std::vector<int>&)>& succ,
                              std::vector<int>& comp) {
    comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    struct Frame {
        int v;
        std::vector<int> next;
        std::size_t i;
    };
    std::vector<Frame> frames;
    int counter = 0, ncomp = 0;
    for (int root = 0; root < n; ++root) {
        if (!active[root] || index[root] >= 0) continue;
        auto open = [&](int v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = 1;
            Frame f{v, {}, 0};
            succ(v, f.next);
            frames.push_back(std::move(f));
        };
        open(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.i < f.next.size()) {
                int w = f.next[f.i++];
                if (w < 0 || w >= n || !active[w]) continue;
                if (index[w] < 0) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            int v = f.v;
            if (low[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = ncomp;
                    if (w == v) break;
                }
                ++ncomp;
            }
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
    }
    return ncomp;
}

/// Topological order of nodes 0..n-1, smallest id first among the
/// available ones; empty if the edges contain a cycle.
inline std::vector<int> topo_order(int nlocks, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> indeg(nlocks, 0);
    std::vector<std::vector<int>> succ(nlocks);
    for (auto [x, y] : edges) {
        succ[x].push_back(y);
        ++indeg[y];
    }
    std::vector<int> order;
    std::vector<char> done(nlocks, 0);
    for (int round = 0; round < nlocks; ++round) {
        int pick = -1;
        for (int t = 0; t < nlocks && pick < 0; ++t)
            if (!done[t] && indeg[t] == 0) pick = t;
        if (pick < 0) return {};
        done[pick] = 1;
        order.push_back(pick);
        for (int y : succ[pick]) --indeg[y];
    }
    return order;
}

}  // namespace lss::detail
