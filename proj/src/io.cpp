#include "lss/io.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lss/errors.hpp"

namespace lss {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------- reading helpers

/// A JSON value with its path, so every error names where it happened.
struct Node {
    const json& v;
    std::string path;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError((path.empty() ? std::string("$") : path) + ": " + msg);
    }
    bool has(const char* key) const { return v.is_object() && v.contains(key); }
    Node at(const char* key) const {
        if (!v.is_object()) fail("expected an object");
        auto it = v.find(key);
        if (it == v.end()) fail(std::string("missing key '") + key + "'");
        return {*it, path + "." + key};
    }
    Node operator[](std::size_t i) const { return {v[i], path + "[" + std::to_string(i) + "]"}; }
    std::size_t size() const {
        if (!v.is_array()) fail("expected an array");
        return v.size();
    }
    std::string str() const {
        if (!v.is_string()) fail("expected a string");
        return v.get<std::string>();
    }
    long long integer() const {
        if (!v.is_number_integer()) fail("expected an integer");
        return v.get<long long>();
    }
    bool boolean() const {
        if (!v.is_boolean()) fail("expected a boolean");
        return v.get<bool>();
    }
};

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

/// Strips an optional "proc." prefix; rejects another process's prefix.
std::string local_action(const Node& n, const std::string& proc, const std::set<std::string>& procs) {
    std::string a = n.str();
    if (a.rfind(proc + ".", 0) == 0) return a.substr(proc.size() + 1);
    auto dot = a.find('.');
    if (dot != std::string::npos && procs.count(a.substr(0, dot)))
        n.fail("action '" + a + "' belongs to process " + a.substr(0, dot));
    return a;
}

int state_of(const Node& n, const Process& p) {
    int s = p.find_state(n.str());
    if (s < 0) n.fail("unknown state '" + n.str() + "' of process " + p.name);
    return s;
}

int process_of(const Node& n, const System& sys) {
    int q = sys.find_process(n.str());
    if (q < 0) n.fail("unknown process '" + n.str() + "'");
    return q;
}

int lock_of(const Node& n, const System& sys) {
    int t = sys.find_lock(n.str());
    if (t < 0) n.fail("undeclared lock '" + n.str() + "'");
    return t;
}

int action_of(const Node& n, const Process& p, const System& sys) {
    std::set<std::string> procs;
    for (const Process& q : sys.procs) procs.insert(q.name);
    int a = p.find_action(local_action(n, p.name, procs));
    if (a < 0) n.fail("unknown action '" + n.str() + "' of process " + p.name);
    return a;
}

std::vector<int> local_actions(const Node& n, const Process& p, const System& sys) {
    std::vector<int> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(action_of(n[i], p, sys));
    return out;
}

std::vector<Move> moves_of(const Node& n, const System& sys) {
    std::vector<Move> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        Node m = n[i];
        if (m.size() != 2) m.fail("expected [process, action]");
        int q = process_of(m[0], sys);
        out.push_back({q, action_of(m[1], sys.procs[q], sys)});
    }
    return out;
}

json moves_json(const std::vector<Move>& ms, const System& sys) {
    json a = json::array();
    for (const Move& m : ms)
        a.push_back({sys.procs.at(m.proc).name, sys.procs[m.proc].actions.at(m.action)});
    return a;
}

json actions_json(const std::vector<int>& as, const Process& p) {
    json a = json::array();
    for (int x : as) a.push_back(p.actions.at(x));
    return a;
}

std::string lock_name(int t, const System& sys) {
    return t < static_cast<int>(sys.locks.size()) ? sys.locks[t] : "#" + std::to_string(t);
}

std::string quote(const std::string& s) {
    std::string r = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') r += '\\';
        r += c;
    }
    return r + "\"";
}

std::string op_label(const LockOp& op, const System& sys) {
    switch (op.kind) {
        case OpKind::Get: return "get " + lock_name(op.lock, sys);
        case OpKind::Rel: return "rel " + lock_name(op.lock, sys);
        case OpKind::Nop: return "nop";
    }
    return "";
}

void process_body(std::ostringstream& o, const Process& p, const System& sys,
                  const std::string& prefix, const std::string& indent) {
    for (std::size_t s = 0; s < p.states.size(); ++s)
        o << indent << quote(prefix + p.states[s]) << " [label=" << quote(p.states[s])
          << (static_cast<int>(s) == p.initial ? ", shape=doublecircle" : "") << "];\n";
    for (std::size_t s = 0; s < p.states.size(); ++s)
        for (const Edge& e : p.out[s])
            o << indent << quote(prefix + p.states[s]) << " -> " << quote(prefix + p.states[e.to])
              << " [label=" << quote(p.actions[e.action] + " / " + op_label(p.op(e.action), sys))
              << "];\n";
}

}  // namespace

// ---------------------------------------------------------------- systems

System parse_system(const std::string& text) {
    json doc = parse_json(text);
    Node root{doc, ""};
    System sys;
    Node locks = root.at("locks");
    for (std::size_t i = 0; i < locks.size(); ++i) {
        std::string t = locks[i].str();
        if (sys.find_lock(t) >= 0) locks[i].fail("duplicate lock '" + t + "'");
        sys.add_lock(t);
    }
    Node procs = root.at("processes");
    std::set<std::string> names;
    for (std::size_t i = 0; i < procs.size(); ++i) {
        std::string n = procs[i].at("name").str();
        if (!names.insert(n).second) procs[i].at("name").fail("duplicate process '" + n + "'");
    }
    for (std::size_t i = 0; i < procs.size(); ++i) {
        Node pn = procs[i];
        Process p;
        p.name = pn.at("name").str();
        Node states = pn.at("states");
        for (std::size_t k = 0; k < states.size(); ++k) {
            std::string s = states[k].str();
            if (p.find_state(s) >= 0) states[k].fail("duplicate state '" + s + "'");
            p.add_state(s);
        }
        if (p.states.empty()) states.fail("a process needs at least one state");
        p.initial = state_of(pn.at("initial"), p);
        static const json empty = json::array();
        Node trans = pn.has("transitions") ? pn.at("transitions") : Node{empty, pn.path + ".transitions"};
        for (std::size_t k = 0; k < trans.size(); ++k) {
            Node tn = trans[k];
            int from = state_of(tn.at("from"), p);
            int to = state_of(tn.at("to"), p);
            std::string a = local_action(tn.at("action"), p.name, names);
            Node on = tn.at("op");
            std::string kind = on.at("kind").str();
            LockOp op;
            if (kind == "nop") {
                if (on.has("lock")) on.at("lock").fail("a nop takes no lock");
                op = LockOp::nop();
            } else if (kind == "get" || kind == "rel") {
                int t = lock_of(on.at("lock"), sys);
                op = kind == "get" ? LockOp::get(t) : LockOp::rel(t);
            } else {
                on.at("kind").fail("kind must be get, rel or nop, got '" + kind + "'");
            }
            int id = p.find_action(a);
            if (id < 0) {
                id = p.add_action(a, op);
            } else if (!(p.op(id) == op)) {
                tn.at("action").fail("action '" + a + "' used with two different operations");
            }
            if (p.next(from, id))
                tn.fail("second transition from state '" + p.states[from] + "' on action '" + a + "'");
            p.add_transition(from, id, to);
        }
        sys.procs.push_back(std::move(p));
    }
    sys.validate();
    return sys;
}

std::string serialize_system(const System& sys) {
    json doc;
    doc["locks"] = sys.locks;
    doc["processes"] = json::array();
    for (const Process& p : sys.procs) {
        json pj;
        pj["name"] = p.name;
        pj["states"] = p.states;
        pj["initial"] = p.states.at(p.initial);
        pj["transitions"] = json::array();
        for (std::size_t s = 0; s < p.states.size(); ++s)
            for (const Edge& e : p.out[s]) {
                const LockOp& op = p.op(e.action);
                json oj;
                oj["kind"] = op.kind == OpKind::Get ? "get" : op.kind == OpKind::Rel ? "rel" : "nop";
                if (op.kind != OpKind::Nop) oj["lock"] = sys.locks.at(op.lock);
                pj["transitions"].push_back(
                    {{"from", p.states[s]}, {"action", p.actions[e.action]}, {"op", oj}, {"to", p.states[e.to]}});
            }
        doc["processes"].push_back(pj);
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- objectives

ObjectiveFile parse_objective(const std::string& text, const System& sys) {
    json doc = parse_json(text);
    Node root{doc, ""};
    ObjectiveFile f;
    if (root.has("builtin")) {
        f.builtin = root.at("builtin").str();
        auto proc = [&] { return process_of(root.at("process"), sys); };
        if (f.builtin == "global-deadlock") {
            f.objective = global_deadlock(sys);
        } else if (f.builtin == "process-deadlock") {
            f.process = proc();
            f.objective = process_deadlock(sys, f.process);
        } else if (f.builtin == "universal") {
            f.objective = universal(sys);
        } else if (f.builtin == "local-reach-forever") {
            f.process = proc();
            Node st = root.at("states");
            std::vector<int> targets;
            for (std::size_t i = 0; i < st.size(); ++i)
                targets.push_back(state_of(st[i], sys.procs[f.process]));
            f.objective = local_reach_forever(sys, f.process, targets);
        } else {
            root.at("builtin").fail("unknown builtin '" + f.builtin +
                                    "' (global-deadlock, process-deadlock, local-reach-forever, universal)");
        }
        if (root.has("negate") && root.at("negate").boolean()) {
            f.negated = true;
            f.objective = complement(std::move(f.objective));
        }
        return f;
    }
    Objective& o = f.objective;
    o = universal(sys);
    if (root.has("automata")) {
        Node autos = root.at("automata");
        if (!autos.v.is_object()) autos.fail("expected an object keyed by process");
        std::set<std::string> names;
        for (const Process& q : sys.procs) names.insert(q.name);
        for (auto it = autos.v.begin(); it != autos.v.end(); ++it) {
            Node an{it.value(), autos.path + "." + it.key()};
            int q = sys.find_process(it.key());
            if (q < 0) an.fail("unknown process '" + it.key() + "'");
            const Process& p = sys.procs[q];
            Dfa d = blank_dfa(p);
            Node st = an.at("states");
            for (std::size_t i = 0; i < st.size(); ++i) {
                std::string s = st[i].str();
                if (d.find_state(s) >= 0) st[i].fail("duplicate state '" + s + "'");
                d.add_state(s);
            }
            if (d.states.empty()) st.fail("an automaton needs at least one state");
            auto dstate = [&](const Node& n) {
                int s = d.find_state(n.str());
                if (s < 0) n.fail("unknown automaton state '" + n.str() + "'");
                return s;
            };
            d.initial = dstate(an.at("initial"));
            if (an.has("transitions")) {
                Node tr = an.at("transitions");
                for (std::size_t i = 0; i < tr.size(); ++i) {
                    Node tn = tr[i];
                    int from = dstate(tn.at("from"));
                    int to = dstate(tn.at("to"));
                    Node ln = tn.at("letter");
                    int letter = ln.str() == kPad ? d.pad_letter() : p.find_action(local_action(ln, p.name, names));
                    if (letter < 0) ln.fail("unknown letter '" + ln.str() + "' of process " + p.name);
                    if (d.delta[from][letter] >= 0 && d.delta[from][letter] != to)
                        tn.fail("automaton is not deterministic");
                    d.delta[from][letter] = to;
                }
            }
            complete(d);
            o.automata[q] = std::move(d);
        }
    }
    if (root.has("formula")) {
        Node fn = root.at("formula");
        try {
            o.phi = parse_formula(fn.str(), sys, o);
        } catch (const InputError& e) {
            fn.fail(e.what());
        }
    }
    o.validate(sys);
    return f;
}

std::string serialize_objective(const Objective& obj, const System& sys) {
    json doc;
    doc["automata"] = json::object();
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        const Dfa& d = obj.automata.at(q);
        std::vector<std::string> letters = padded_letters(p);
        json aj;
        aj["states"] = d.states;
        aj["initial"] = d.states.at(d.initial);
        aj["transitions"] = json::array();
        for (std::size_t s = 0; s < d.states.size(); ++s)
            for (int l = 0; l < d.letters; ++l)
                if (d.delta[s][l] >= 0)
                    aj["transitions"].push_back(
                        {{"from", d.states[s]}, {"letter", letters[l]}, {"to", d.states[d.delta[s][l]]}});
        doc["automata"][p.name] = aj;
    }
    doc["formula"] = format_formula(obj.phi, sys, obj);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- witnesses

Witness witness_of(const OracleResult& r) {
    Witness w;
    w.kind = WitnessKind::GlobalLasso;
    if (r.witness) w.lasso = *r.witness;
    w.padded = r.padded;
    return w;
}

Witness witness_of(const PatternCertificate& c, const System& sys) {
    Witness w;
    w.kind = WitnessKind::PatternCertificate;
    w.engine = "patterns2";
    w.disjunct = c.disjunct;
    for (int t : c.order)
        if (t < static_cast<int>(sys.locks.size())) w.order.push_back(t);
    for (std::size_t q = 0; q < c.runs.size(); ++q) {
        w.procs.push_back(static_cast<int>(q));
        w.patterns.push_back(to_string(c.patterns[q], sys));
        w.runs.push_back(c.runs[q]);
    }
    return w;
}

Witness witness_of(const NestedCertificate& c, const System& sys) {
    Witness w;
    w.kind = WitnessKind::PatternCertificate;
    w.engine = "nested";
    w.disjunct = c.disjunct;
    w.order = c.order;
    for (std::size_t q = 0; q < c.runs.size(); ++q) {
        w.procs.push_back(static_cast<int>(q));
        w.patterns.push_back(to_string(c.patterns[q], sys));
        w.runs.push_back(c.runs[q]);
    }
    return w;
}

Witness witness_of(const CircularDeadlock& c) {
    Witness w;
    w.kind = WitnessKind::CircularDeadlock;
    w.engine = "nested";
    w.order = c.order;
    w.procs = c.procs;
    w.states = c.states;
    w.held = c.held;
    w.needed = c.needed;
    w.runs = c.runs;
    return w;
}

std::string serialize_witness(const Witness& w, const System& sys) {
    json doc;
    auto locks = [&](const std::vector<int>& ts) {
        json a = json::array();
        for (int t : ts) a.push_back(lock_name(t, sys));
        return a;
    };
    switch (w.kind) {
        case WitnessKind::GlobalLasso: {
            doc["kind"] = "global-lasso";
            doc["stem"] = moves_json(w.lasso.stem, sys);
            doc["loop"] = moves_json(w.lasso.loop, sys);
            json pad = json::array();
            for (int q : w.padded) pad.push_back(sys.procs.at(q).name);
            doc["padded"] = pad;
            break;
        }
        case WitnessKind::PatternCertificate:
        case WitnessKind::CircularDeadlock: {
            bool circ = w.kind == WitnessKind::CircularDeadlock;
            doc["kind"] = circ ? "circular-deadlock" : "pattern-certificate";
            doc["engine"] = w.engine;
            if (!circ) doc["disjunct"] = w.disjunct;
            doc["order"] = locks(w.order);
            doc["processes"] = json::array();
            for (std::size_t i = 0; i < w.procs.size(); ++i) {
                const Process& p = sys.procs.at(w.procs[i]);
                json e;
                e["name"] = p.name;
                if (circ) {
                    e["state"] = p.states.at(w.states[i]);
                    e["holds"] = lock_name(w.held[i], sys);
                    e["needs"] = lock_name(w.needed[i], sys);
                } else {
                    e["pattern"] = w.patterns[i];
                }
                e["stem"] = actions_json(w.runs[i].stem, p);
                e["loop"] = actions_json(w.runs[i].loop, p);
                doc["processes"].push_back(e);
            }
            break;
        }
    }
    return doc.dump(2) + "\n";
}

Witness parse_witness(const std::string& text, const System& sys) {
    json doc = parse_json(text);
    Node root{doc, ""};
    Witness w;
    std::string kind = root.at("kind").str();
    if (kind == "global-lasso") {
        w.kind = WitnessKind::GlobalLasso;
        w.lasso.stem = moves_of(root.at("stem"), sys);
        w.lasso.loop = moves_of(root.at("loop"), sys);
        if (root.has("padded")) {
            Node pn = root.at("padded");
            for (std::size_t i = 0; i < pn.size(); ++i) w.padded.push_back(process_of(pn[i], sys));
        }
        return w;
    }
    bool circ = kind == "circular-deadlock";
    if (!circ && kind != "pattern-certificate")
        root.at("kind").fail("kind must be global-lasso, pattern-certificate or circular-deadlock");
    w.kind = circ ? WitnessKind::CircularDeadlock : WitnessKind::PatternCertificate;
    w.engine = root.has("engine") ? root.at("engine").str() : "";
    if (root.has("disjunct")) {
        long long d = root.at("disjunct").integer();
        if (d < 0) root.at("disjunct").fail("must be non-negative");
        w.disjunct = static_cast<std::size_t>(d);
    }
    if (root.has("order")) {
        Node on = root.at("order");
        for (std::size_t i = 0; i < on.size(); ++i) w.order.push_back(lock_of(on[i], sys));
    }
    Node ps = root.at("processes");
    for (std::size_t i = 0; i < ps.size(); ++i) {
        Node e = ps[i];
        int q = process_of(e.at("name"), sys);
        const Process& p = sys.procs[q];
        w.procs.push_back(q);
        if (circ) {
            w.states.push_back(state_of(e.at("state"), p));
            w.held.push_back(lock_of(e.at("holds"), sys));
            w.needed.push_back(lock_of(e.at("needs"), sys));
        } else {
            w.patterns.push_back(e.has("pattern") ? e.at("pattern").str() : "");
        }
        LocalLasso l;
        l.stem = local_actions(e.at("stem"), p, sys);
        l.loop = e.has("loop") ? local_actions(e.at("loop"), p, sys) : std::vector<int>{};
        w.runs.push_back(std::move(l));
    }
    return w;
}

std::string replay_witness(const System& sys, const Objective* obj, const Witness& w) {
    try {
        if (w.kind == WitnessKind::GlobalLasso) {
            if (!is_process_fair(sys, w.lasso)) return "lasso is not executable or not process fair";
            if (obj && !lasso_satisfies(sys, w.lasso, *obj)) return "lasso violates the objective";
            return {};
        }
        for (std::size_t i = 0; i < w.runs.size(); ++i)
            validate_local_lasso(sys.procs.at(w.procs[i]), w.runs[i]);
        if (w.kind == WitnessKind::CircularDeadlock) {
            const std::size_t k = w.procs.size();
            if (k < 2) return "a circular deadlock needs at least two processes";
            System sub;
            sub.locks = sys.locks;
            std::vector<LocalLasso> runs;
            for (std::size_t i = 0; i < k; ++i) {
                const Process& p = sys.procs[w.procs[i]];
                if (!w.runs[i].finite()) return "run of " + p.name + " is not finite";
                auto trace = execute_local(p, w.runs[i].stem);
                if (trace.back().state != w.states[i]) return "run of " + p.name + " ends elsewhere";
                if (!has(trace.back().held, w.held[i])) return p.name + " does not hold its lock";
                if (p.out[w.states[i]].empty() || !p.all_get_in(w.states[i], bit(w.needed[i])))
                    return p.name + " is not forced to get " + lock_name(w.needed[i], sys);
                if (w.held[(i + 1) % k] != w.needed[i]) return "the needed locks do not form a cycle";
                sub.procs.push_back(p);
                runs.push_back(w.runs[i]);
            }
            if (!can_schedule(sub, runs)) return "the runs cannot be interleaved";
            return {};
        }
        if (w.procs.size() != sys.procs.size()) return "a certificate needs one run per process";
        std::vector<LocalLasso> runs(sys.procs.size());
        for (std::size_t i = 0; i < w.procs.size(); ++i) runs[w.procs[i]] = w.runs[i];
        if (!can_schedule(sys, runs)) return "the runs cannot be interleaved into a fair run";
        if (obj) {
            std::set<int> inf;
            for (std::size_t q = 0; q < sys.procs.size(); ++q)
                for (int s : recurrent_states(obj->automata[q], runs[q].stem, runs[q].loop))
                    inf.insert(inf_atom(static_cast<int>(q), s));
            if (!eval(obj->phi, [&](int a) { return inf.count(a) > 0; }))
                return "the runs violate the objective";
        }
        return {};
    } catch (const InputError& e) {
        return e.what();
    }
}

// ---------------------------------------------------------------- formats

Cnf parse_dimacs(const std::string& text) {
    Cnf cnf;
    std::istringstream in(text);
    std::string line;
    std::vector<int> lits;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == 'c' || line[first] == 'p' || line[first] == '%') continue;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            int x = 0;
            try {
                std::size_t used = 0;
                x = std::stoi(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InputError("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
            }
            if (x != 0) {
                lits.push_back(x);
                continue;
            }
            if (lits.size() != 3)
                throw InputError("line " + std::to_string(lineno) + ": clause with " +
                                 std::to_string(lits.size()) + " literals, expected 3");
            cnf.push_back({lits[0], lits[1], lits[2]});
            lits.clear();
        }
    }
    if (!lits.empty()) throw InputError("last clause is not terminated by 0");
    if (cnf.empty()) throw InputError("empty CNF");
    return cnf;
}

std::string serialize_dimacs(const Cnf& cnf) {
    int vars = 0;
    for (const auto& c : cnf)
        for (int l : c) vars = std::max(vars, std::abs(l));
    std::ostringstream o;
    o << "p cnf " << vars << " " << cnf.size() << "\n";
    for (const auto& c : cnf) o << c[0] << " " << c[1] << " " << c[2] << " 0\n";
    return o.str();
}

UGraph parse_graph(const std::string& text) {
    json doc = parse_json(text);
    Node root{doc, ""};
    UGraph g;
    long long n = root.at("vertices").integer();
    if (n < 0) root.at("vertices").fail("must be non-negative");
    g.vertices = static_cast<int>(n);
    Node es = root.at("edges");
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < es.size(); ++i) {
        Node e = es[i];
        if (e.size() != 2) e.fail("expected [u, v]");
        long long u = e[0].integer(), v = e[1].integer();
        if (u < 1 || u > n || v < 1 || v > n) e.fail("vertex out of range 1.." + std::to_string(n));
        if (u == v) e.fail("self loop");
        std::pair<int, int> key = std::minmax(static_cast<int>(u) - 1, static_cast<int>(v) - 1);
        if (!seen.insert(key).second) e.fail("duplicate edge");
        g.edges.push_back(key);
    }
    return g;
}

// ---------------------------------------------------------------- DOT

std::string dot_process(const Process& p, const System& sys) {
    std::ostringstream o;
    o << "digraph " << quote(p.name) << " {\n";
    process_body(o, p, sys, "", "  ");
    o << "}\n";
    return o.str();
}

std::string dot_system(const System& sys) {
    std::ostringstream o;
    o << "digraph lss {\n";
    for (std::size_t q = 0; q < sys.procs.size(); ++q) {
        const Process& p = sys.procs[q];
        o << "  subgraph " << quote("cluster_" + p.name) << " {\n    label=" << quote(p.name) << ";\n";
        process_body(o, p, sys, p.name + ".", "    ");
        o << "  }\n";
    }
    o << "}\n";
    return o.str();
}

std::string dot_dfa(const Dfa& d, const Process& p) {
    std::vector<std::string> letters = padded_letters(p);
    std::ostringstream o;
    o << "digraph " << quote("B_" + p.name) << " {\n";
    for (std::size_t s = 0; s < d.states.size(); ++s)
        o << "  " << quote(d.states[s])
          << (static_cast<int>(s) == d.initial ? " [shape=doublecircle]" : "") << ";\n";
    for (std::size_t s = 0; s < d.states.size(); ++s) {
        // merge letters with the same target into one edge
        std::map<int, std::string> by_target;
        for (int l = 0; l < d.letters; ++l) {
            int t = d.delta[s][l];
            if (t < 0) continue;
            auto& lab = by_target[t];
            lab += (lab.empty() ? "" : ",") + letters[l];
        }
        for (const auto& [t, lab] : by_target)
            o << "  " << quote(d.states[s]) << " -> " << quote(d.states[t]) << " [label=" << quote(lab)
              << "];\n";
    }
    o << "}\n";
    return o.str();
}

std::string dot_lock_graph(const LockGraph& g, const System& sys) {
    std::ostringstream o;
    o << "digraph G {\n";
    for (int t = 0; t < g.locks; ++t) o << "  " << quote(lock_name(t, sys)) << ";\n";
    for (const LockEdge& e : g.edges)
        o << "  " << quote(lock_name(e.from, sys)) << " -> " << quote(lock_name(e.to, sys))
          << " [label=" << quote(sys.procs.at(e.proc).name) << "];\n";
    o << "}\n";
    return o.str();
}

std::string dot_inf_graph(const System& sys, const std::vector<Pattern2>& patterns) {
    std::ostringstream o;
    o << "digraph G_Inf {\n  edge [dir=none];\n";
    for (std::size_t t = 0; t < sys.locks.size(); ++t) o << "  " << quote(sys.locks[t]) << ";\n";
    for (std::size_t q = 0; q < patterns.size() && q < sys.procs.size(); ++q) {
        if (!patterns[q].switching()) continue;
        auto ls = members(sys.procs[q].locks());
        if (ls.size() != 2) continue;
        o << "  " << quote(lock_name(ls[0], sys)) << " -> " << quote(lock_name(ls[1], sys))
          << " [label=" << quote(sys.procs[q].name) << "];\n";
    }
    o << "}\n";
    return o.str();
}

std::string dot_ela(const Ela& a) {
    std::ostringstream o;
    o << "digraph ela {\n";
    std::string acc = to_string(a.acceptance, [&](int s) { return "inf(" + a.states.at(s) + ")"; });
    o << "  label=" << quote("acceptance: " + acc) << ";\n";
    for (std::size_t s = 0; s < a.states.size(); ++s)
        o << "  " << quote(a.states[s])
          << (static_cast<int>(s) == a.initial ? " [shape=doublecircle]" : "") << ";\n";
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        for (auto [l, t] : a.delta[s])
            o << "  " << quote(a.states[s]) << " -> " << quote(a.states[t]) << " [label=" << quote(a.letters[l])
              << "];\n";
        for (int t : a.eps[s])
            o << "  " << quote(a.states[s]) << " -> " << quote(a.states[t]) << " [label=\"eps\", style=dashed];\n";
    }
    o << "}\n";
    return o.str();
}

}  // namespace lss
