#include "lss/core.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <map>
#include <set>

#include "lss/errors.hpp"

namespace lss {

int popcount(LockSet s) { return std::popcount(s); }

std::vector<int> members(LockSet s) {
    std::vector<int> r;
    while (s) {
        int t = std::countr_zero(s);
        r.push_back(t);
        s &= s - 1;
    }
    return r;
}

int Process::add_state(const std::string& s) {
    states.push_back(s);
    out.emplace_back();
    return static_cast<int>(states.size()) - 1;
}

int Process::add_action(const std::string& a, LockOp op) {
    actions.push_back(a);
    ops.push_back(op);
    return static_cast<int>(actions.size()) - 1;
}

void Process::add_transition(int from, int action, int to) {
    auto& v = out.at(from);
    auto it = std::lower_bound(v.begin(), v.end(), action,
                               [](const Edge& e, int a) { return e.action < a; });
    if (it != v.end() && it->action == action)
        throw InputError("process " + name + ": two transitions for state " + states[from] +
                         " and action " + actions.at(action));
    v.insert(it, Edge{action, to});
}

int Process::find_state(const std::string& s) const {
    auto it = std::find(states.begin(), states.end(), s);
    return it == states.end() ? -1 : static_cast<int>(it - states.begin());
}

int Process::find_action(const std::string& a) const {
    auto it = std::find(actions.begin(), actions.end(), a);
    return it == actions.end() ? -1 : static_cast<int>(it - actions.begin());
}

std::optional<int> Process::next(int state, int action) const {
    const auto& v = out[state];
    auto it = std::lower_bound(v.begin(), v.end(), action,
                               [](const Edge& e, int a) { return e.action < a; });
    if (it != v.end() && it->action == action) return it->to;
    return std::nullopt;
}

LockSet Process::locks() const {
    LockSet s = phantom;
    for (const auto& o : ops)
        if (o.kind != OpKind::Nop) s |= bit(o.lock);
    return s;
}

LockSet Process::gettable(int state) const {
    LockSet s = 0;
    for (const auto& e : out[state])
        if (ops[e.action].kind == OpKind::Get) s |= bit(ops[e.action].lock);
    return s;
}

bool Process::all_get_in(int state, LockSet within) const {
    for (const auto& e : out[state]) {
        const auto& o = ops[e.action];
        if (o.kind != OpKind::Get || !has(within, o.lock)) return false;
    }
    return true;
}

std::size_t Process::num_transitions() const {
    std::size_t n = 0;
    for (const auto& v : out) n += v.size();
    return n;
}

int System::add_lock(const std::string& name) {
    locks.push_back(name);
    return static_cast<int>(locks.size()) - 1;
}

int System::find_lock(const std::string& name) const {
    auto it = std::find(locks.begin(), locks.end(), name);
    return it == locks.end() ? -1 : static_cast<int>(it - locks.begin());
}

int System::find_process(const std::string& name) const {
    for (std::size_t i = 0; i < procs.size(); ++i)
        if (procs[i].name == name) return static_cast<int>(i);
    return -1;
}

void System::validate() const {
    if (locks.size() > static_cast<std::size_t>(kMaxLocks))
        throw InputError("at most 64 locks are supported");
    std::set<std::string> lock_names(locks.begin(), locks.end());
    if (lock_names.size() != locks.size()) throw InputError("duplicate lock name");
    std::set<std::string> names;
    for (const auto& p : procs) {
        if (!names.insert(p.name).second) throw InputError("duplicate process name " + p.name);
        if (p.states.empty()) throw InputError("process " + p.name + " has no states");
        if (p.initial < 0 || p.initial >= static_cast<int>(p.states.size()))
            throw InputError("process " + p.name + ": bad initial state");
        if (p.out.size() != p.states.size())
            throw InputError("process " + p.name + ": adjacency size mismatch");
        std::set<std::string> snames(p.states.begin(), p.states.end());
        if (snames.size() != p.states.size())
            throw InputError("process " + p.name + ": duplicate state name");
        std::set<std::string> anames(p.actions.begin(), p.actions.end());
        if (anames.size() != p.actions.size())
            throw InputError("process " + p.name + ": duplicate action name");
        for (const auto& a : p.actions)
            if (a == "#pad") throw InputError("process " + p.name + ": action name #pad is reserved");
        for (const auto& o : p.ops)
            if (o.kind != OpKind::Nop && (o.lock < 0 || o.lock >= static_cast<int>(locks.size())))
                throw InputError("process " + p.name + ": operation on undeclared lock");
        for (const auto& v : p.out)
            for (const auto& e : v)
                if (e.to < 0 || e.to >= static_cast<int>(p.states.size()) || e.action < 0 ||
                    e.action >= static_cast<int>(p.actions.size()))
                    throw InputError("process " + p.name + ": dangling transition");
    }
}

const char* to_string(Blocked b) {
    switch (b) {
        case Blocked::None: return "enabled";
        case Blocked::NoTransition: return "no-transition";
        case Blocked::HeldByOther: return "lock-held-by-other";
        case Blocked::NotHeld: return "lock-not-held";
        case Blocked::HeldBySelf: return "lock-held-by-self";
    }
    return "?";
}

GlobalConfig initial_config(const System& sys) {
    GlobalConfig c;
    for (const auto& p : sys.procs) {
        c.state.push_back(p.initial);
        c.held.push_back(0);
    }
    return c;
}

Blocked can_fire(const System& sys, const GlobalConfig& cfg, Move m) {
    const Process& p = sys.procs[m.proc];
    if (!p.next(cfg.state[m.proc], m.action)) return Blocked::NoTransition;
    const LockOp& o = p.op(m.action);
    if (o.kind == OpKind::Get) {
        if (has(cfg.held[m.proc], o.lock)) return Blocked::HeldBySelf;
        for (std::size_t q = 0; q < cfg.held.size(); ++q)
            if (has(cfg.held[q], o.lock)) return Blocked::HeldByOther;
    } else if (o.kind == OpKind::Rel) {
        if (!has(cfg.held[m.proc], o.lock)) return Blocked::NotHeld;
    }
    return Blocked::None;
}

std::optional<GlobalConfig> step(const System& sys, const GlobalConfig& cfg, Move m, Blocked* why) {
    Blocked b = can_fire(sys, cfg, m);
    if (why) *why = b;
    if (b != Blocked::None) return std::nullopt;
    GlobalConfig c = cfg;
    const Process& p = sys.procs[m.proc];
    c.state[m.proc] = *p.next(cfg.state[m.proc], m.action);
    const LockOp& o = p.op(m.action);
    if (o.kind == OpKind::Get) c.held[m.proc] |= bit(o.lock);
    if (o.kind == OpKind::Rel) c.held[m.proc] &= ~bit(o.lock);
    return c;
}

std::vector<Move> enabled_moves(const System& sys, const GlobalConfig& cfg) {
    std::vector<Move> r;
    for (std::size_t q = 0; q < sys.procs.size(); ++q)
        for (const auto& e : sys.procs[q].out[cfg.state[q]]) {
            Move m{static_cast<int>(q), e.action};
            if (can_fire(sys, cfg, m) == Blocked::None) r.push_back(m);
        }
    return r;
}

bool process_enabled(const System& sys, const GlobalConfig& cfg, int proc) {
    for (const auto& e : sys.procs[proc].out[cfg.state[proc]])
        if (can_fire(sys, cfg, Move{proc, e.action}) == Blocked::None) return true;
    return false;
}

std::vector<GlobalConfig> execute(const System& sys, const std::vector<Move>& moves) {
    std::vector<GlobalConfig> trace{initial_config(sys)};
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const Move& m = moves[i];
        if (m.proc < 0 || m.proc >= static_cast<int>(sys.procs.size()) || m.action < 0 ||
            m.action >= static_cast<int>(sys.procs[m.proc].actions.size()))
            throw InputError("run index " + std::to_string(i) + ": unknown move");
        Blocked why;
        auto next = step(sys, trace.back(), m, &why);
        if (!next)
            throw InputError("run index " + std::to_string(i) + ": move not enabled (" +
                             to_string(why) + ")");
        trace.push_back(std::move(*next));
    }
    return trace;
}

std::vector<int> project(const std::vector<Move>& run, int proc) {
    std::vector<int> r;
    for (const auto& m : run)
        if (m.proc == proc) r.push_back(m.action);
    return r;
}

std::vector<LocalStep> execute_local(const Process& p, const std::vector<int>& actions) {
    std::vector<LocalStep> r{{p.initial, 0}};
    for (std::size_t i = 0; i < actions.size(); ++i) {
        LocalStep cur = r.back();
        int a = actions[i];
        auto to = (a >= 0 && a < static_cast<int>(p.actions.size())) ? p.next(cur.state, a)
                                                                       : std::nullopt;
        if (!to)
            throw InputError("process " + p.name + ": local run index " + std::to_string(i) +
                             " has no transition");
        const LockOp& o = p.op(a);
        if (o.kind == OpKind::Get) {
            if (has(cur.held, o.lock))
                throw InputError("process " + p.name + ": local run index " +
                                 std::to_string(i) + " acquires a held lock");
            cur.held |= bit(o.lock);
        } else if (o.kind == OpKind::Rel) {
            if (!has(cur.held, o.lock))
                throw InputError("process " + p.name + ": local run index " +
                                 std::to_string(i) + " releases a free lock");
            cur.held &= ~bit(o.lock);
        }
        cur.state = *to;
        r.push_back(cur);
    }
    return r;
}

void validate_local_lasso(const Process& p, const LocalLasso& l) {
    std::vector<int> all = l.stem;
    all.insert(all.end(), l.loop.begin(), l.loop.end());
    auto tr = execute_local(p, all);
    if (!l.loop.empty()) {
        const auto& a = tr[l.stem.size()];
        const auto& b = tr.back();
        if (a.state != b.state || a.held != b.held)
            throw InputError("process " + p.name + ": loop does not return to its start");
    }
}

SoundReport check_sound(const System& sys) {
    SoundReport r;
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        std::vector<LockSet> owns(p.states.size(), 0);
        std::vector<bool> seen(p.states.size(), false);
        std::deque<int> todo{p.initial};
        seen[p.initial] = true;
        auto fail = [&](int s, int a, const char* why) {
            if (!r.violation)
                r.violation = SoundViolation{static_cast<int>(q), s, a, why};
            r.sound = false;
        };
        while (!todo.empty()) {
            int s = todo.front();
            todo.pop_front();
            for (const auto& e : p.out[s]) {
                const LockOp& o = p.op(e.action);
                LockSet next = owns[s];
                if (o.kind == OpKind::Get) {
                    if (has(next, o.lock)) {
                        fail(s, e.action, "get-held");
                        continue;
                    }
                    next |= bit(o.lock);
                } else if (o.kind == OpKind::Rel) {
                    if (!has(next, o.lock)) {
                        fail(s, e.action, "rel-not-held");
                        continue;
                    }
                    next &= ~bit(o.lock);
                }
                if (!seen[e.to]) {
                    seen[e.to] = true;
                    owns[e.to] = next;
                    todo.push_back(e.to);
                } else if (owns[e.to] != next) {
                    fail(s, e.action, "conflicting-owns");
                }
            }
        }
        r.owns.push_back(std::move(owns));
        r.reachable.push_back(std::move(seen));
    }
    return r;
}

ExclusiveReport check_exclusive(const System& sys) {
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        for (std::size_t s = 0; s < p.states.size(); ++s) {
            int lock = -1;
            bool any_get = false, mixed = false;
            for (const auto& e : p.out[s]) {
                const LockOp& o = p.op(e.action);
                if (o.kind == OpKind::Get) {
                    if (any_get && o.lock != lock) mixed = true;
                    any_get = true;
                    lock = o.lock;
                } else {
                    mixed = true;
                }
            }
            if (any_get && mixed) return {false, static_cast<int>(q), static_cast<int>(s)};
        }
    }
    return {};
}

TwoLockReport check_2lss(const System& sys) {
    TwoLockReport r;
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        int n = popcount(sys.procs[q].locks());
        r.lock_count.push_back(n);
        if (n >= 3 && r.two_lock) {
            r.two_lock = false;
            r.proc = static_cast<int>(q);
        }
    }
    return r;
}

TwoLockView pad_to_two_locks(const System& sys) {
    auto rep = check_2lss(sys);
    if (!rep.two_lock)
        throw Inapplicable("2lss", "process " + sys.procs[rep.proc].name + " uses " +
                                       std::to_string(rep.lock_count[rep.proc]) + " locks");
    TwoLockView v{sys, {}};
    for (auto& p : v.sys.procs) {
        int n = 0;
        while (popcount(p.locks()) < 2) {
            int t = v.sys.add_lock("~phantom." + p.name + "." + std::to_string(n++));
            p.phantom |= bit(t);
        }
        auto ls = members(p.locks());
        v.pair.push_back({ls[0], ls[1]});
    }
    if (v.sys.locks.size() > static_cast<std::size_t>(kMaxLocks))
        throw Inapplicable("2lss", "phantom padding exceeds 64 locks");
    return v;
}

NestedReport check_nested(const System& sys, std::size_t budget) {
    NestedReport r;
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        using Key = std::pair<int, std::vector<int>>;
        std::map<Key, int> index;
        std::vector<Key> nodes;
        std::vector<std::pair<int, int>> parent;  // (node, action)
        auto add = [&](Key k, int par, int act) {
            auto [it, fresh] = index.emplace(k, static_cast<int>(nodes.size()));
            if (fresh) {
                if (nodes.size() >= budget)
                    throw BudgetExceeded("nestedness check exceeded " + std::to_string(budget) +
                                         " (state, stack) pairs");
                nodes.push_back(std::move(k));
                parent.emplace_back(par, act);
            }
        };
        add({p.initial, {}}, -1, -1);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            Key cur = nodes[i];
            for (const auto& e : p.out[cur.first]) {
                const LockOp& o = p.op(e.action);
                std::vector<int> st = cur.second;
                if (o.kind == OpKind::Get) {
                    if (std::find(st.begin(), st.end(), o.lock) != st.end()) continue;
                    st.push_back(o.lock);
                } else if (o.kind == OpKind::Rel) {
                    auto it = std::find(st.begin(), st.end(), o.lock);
                    if (it == st.end()) continue;
                    if (it + 1 != st.end()) {
                        r.nested = false;
                        r.proc = static_cast<int>(q);
                        std::vector<int> w{e.action};
                        for (int n = static_cast<int>(i); parent[n].first >= 0; n = parent[n].first)
                            w.push_back(parent[n].second);
                        std::reverse(w.begin(), w.end());
                        r.witness = std::move(w);
                        return r;
                    }
                    st.pop_back();
                }
                add({e.to, std::move(st)}, static_cast<int>(i), e.action);
            }
        }
    }
    return r;
}

}  // namespace lss
