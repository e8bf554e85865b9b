// lssc: classify lock-sharing systems, decide regular objectives and
// deadlocks, generate families, export DOT.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lss/errors.hpp"
#include "lss/exclusive2.hpp"
#include "lss/generators.hpp"
#include "lss/io.hpp"
#include "lss/nestedpat.hpp"
#include "lss/oracle.hpp"
#include "lss/patterns2.hpp"

using json = nlohmann::json;
using namespace lss;

namespace {

constexpr int kExitNo = 0;
constexpr int kExitYes = 10;
constexpr int kExitInput = 1;
constexpr int kExitBudget = 2;
constexpr int kExitDisagree = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw InputError("cannot write " + out);
    f << text;
}

int find_proc(const System& sys, const std::string& name) {
    int q = sys.find_process(name);
    if (q < 0) throw InputError("unknown process '" + name + "'");
    return q;
}

/// What one engine run produced.
struct Outcome {
    bool yes = false;
    std::string engine;
    std::optional<Witness> witness;
    json evidence = json::object();
};

enum class Query { Objective, ProcessDeadlock, GlobalDeadlock, Circular };

bool sound_2lss(const System& sys) { return check_sound(sys).sound && check_2lss(sys).two_lock; }
bool sound_nested(const System& sys) { return check_sound(sys).sound && check_nested(sys).nested; }
bool exclusive_2lss(const System& sys) {
    return sound_2lss(sys) && check_exclusive(sys).exclusive;
}

std::string pick_engine(const System& sys, Query q) {
    if (q == Query::Circular) return "nested";
    if (q == Query::ProcessDeadlock && exclusive_2lss(sys)) return "exclusive2";
    if (sound_2lss(sys)) return "patterns2";
    if (sound_nested(sys)) return "nested";
    return "oracle";
}

Outcome run_engine(const std::string& engine, const System& sys, const Objective& obj, Query q, int proc) {
    Outcome r;
    r.engine = engine;
    if (engine == "exclusive2") {
        // the classifiers are checked first so that a wrong class is
        // reported before a wrong objective
        build_lock_graph(sys);
        if (q != Query::ProcessDeadlock)
            throw Inapplicable("objective", "exclusive2 only decides whether one process deadlocks");
        PtimeVerdict v = process_deadlock_ptime(sys, proc);
        r.yes = v.yes;
        if (v.yes) {
            r.evidence["condition"] = v.condition;
            if (v.state >= 0) r.evidence["state"] = sys.procs[proc].states[v.state];
            json path = json::array();
            for (int t : v.path) path.push_back(sys.locks[t]);
            r.evidence["path"] = path;
            if (v.pair)
                r.evidence["keeper"] = {{"process", sys.procs[v.pair->proc].name},
                                        {"lock", sys.locks[v.pair->lock]}};
        }
        return r;
    }
    if (q == Query::Circular) {
        if (engine != "nested") throw Inapplicable("engine", "circular deadlocks are decided by the nested engine");
        auto c = detect_circular_deadlock(sys);
        r.yes = c.has_value();
        if (c) r.witness = witness_of(*c);
        return r;
    }
    if (engine == "patterns2") {
        Verdict2 v = verify_2lss(sys, obj);
        r.yes = v.yes;
        if (v.certificate) r.witness = witness_of(*v.certificate, sys);
    } else if (engine == "nested") {
        VerdictNested v = verify_nested(sys, obj);
        r.yes = v.yes;
        if (v.certificate) r.witness = witness_of(*v.certificate, sys);
    } else if (engine == "oracle") {
        OracleResult o = explore_verify(sys, obj);
        r.yes = o.yes;
        r.evidence["states"] = o.states;
        if (o.yes) r.witness = witness_of(o);
    } else {
        throw InputError("unknown engine '" + engine + "'");
    }
    return r;
}

struct DecideOptions {
    std::string engine = "auto";
    bool xcheck = false;
    std::string witness_out;
    bool as_json = false;
};

int decide(const System& sys, const Objective& obj, Query q, int proc, const DecideOptions& o) {
    std::string engine = o.engine == "auto" ? pick_engine(sys, q) : o.engine;
    Outcome r = run_engine(engine, sys, obj, q, proc);
    json report;
    report["verdict"] = r.yes ? "yes" : "no";
    report["engine"] = r.engine;
    if (!r.evidence.empty()) report["evidence"] = r.evidence;
    int code = r.yes ? kExitYes : kExitNo;
    if (o.xcheck && engine != "oracle") {
        if (q == Query::Circular) {
            report["xcheck"] = "skipped: no oracle for circular deadlocks";
        } else {
            try {
                bool other = explore_verify(sys, obj).yes;
                report["xcheck"] = other == r.yes ? "agree" : "DISAGREE";
                if (other != r.yes) code = kExitDisagree;
            } catch (const BudgetExceeded& e) {
                report["xcheck"] = std::string("skipped: ") + e.what();
            }
        }
    }
    if (r.witness) {
        std::string text = serialize_witness(*r.witness, sys);
        if (!o.witness_out.empty()) emit(text, o.witness_out);
        report["witness"] = json::parse(text);
    }
    if (o.as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "verdict: " << (r.yes ? "yes" : "no") << "\nengine: " << r.engine << "\n";
        if (!r.evidence.empty()) std::cout << "evidence: " << r.evidence.dump() << "\n";
        if (report.contains("xcheck")) std::cout << "xcheck: " << report["xcheck"].get<std::string>() << "\n";
        if (r.witness && o.witness_out.empty()) std::cout << "witness: " << report["witness"].dump() << "\n";
        if (r.witness && !o.witness_out.empty()) std::cout << "witness written to " << o.witness_out << "\n";
    }
    return code;
}

int cmd_check(const System& sys, bool as_json) {
    SoundReport sr = check_sound(sys);
    ExclusiveReport ex = check_exclusive(sys);
    TwoLockReport tl = check_2lss(sys);
    NestedReport ne = check_nested(sys);
    json r;
    r["sound"] = sr.sound;
    if (sr.violation) {
        const Process& p = sys.procs[sr.violation->proc];
        r["sound_violation"] = {{"process", p.name},
                                {"state", p.states[sr.violation->state]},
                                {"action", p.actions[sr.violation->action]},
                                {"reason", sr.violation->reason}};
    }
    r["exclusive"] = ex.exclusive;
    if (!ex.exclusive)
        r["exclusive_violation"] = {{"process", sys.procs[ex.proc].name},
                                    {"state", sys.procs[ex.proc].states[ex.state]}};
    r["two_lock"] = tl.two_lock;
    json counts = json::object();
    for (std::size_t q = 0; q < sys.procs.size(); ++q) counts[sys.procs[q].name] = tl.lock_count[q];
    r["locks_per_process"] = counts;
    r["nested"] = ne.nested;
    if (!ne.nested) {
        const Process& p = sys.procs[ne.proc];
        json run = json::array();
        for (int a : ne.witness) run.push_back(p.actions[a]);
        r["nested_violation"] = {{"process", p.name}, {"run", run}};
    }
    if (as_json) {
        std::cout << r.dump(2) << "\n";
        return 0;
    }
    std::cout << "processes: " << sys.procs.size() << "\nlocks: " << sys.locks.size() << "\n";
    std::cout << "sound: " << (sr.sound ? "yes" : "no");
    if (sr.violation) std::cout << " (" << r["sound_violation"].dump() << ")";
    std::cout << "\nexclusive: " << (ex.exclusive ? "yes" : "no");
    if (!ex.exclusive) std::cout << " (" << r["exclusive_violation"].dump() << ")";
    std::cout << "\n2lss: " << (tl.two_lock ? "yes" : "no") << " " << counts.dump();
    std::cout << "\nnested: " << (ne.nested ? "yes" : "no");
    if (!ne.nested) std::cout << " (" << r["nested_violation"].dump() << ")";
    std::cout << "\n";
    return 0;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) {
            try {
                out.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw InputError("expected a comma separated list of integers, got '" + s + "'");
            }
        }
    return out;
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lssc: deadlocks and regular objectives of lock-sharing systems"};
    app.require_subcommand(1);

    bool as_json = false;
    std::string sys_path, obj_path, witness_path, out_path;
    DecideOptions dopt;
    const std::vector<std::string> engines{"auto", "patterns2", "nested", "exclusive2", "oracle"};

    auto* check = app.add_subcommand("check", "classify a system (sound, exclusive, 2lss, nested)");
    check->add_option("system", sys_path, "system JSON")->required();
    check->add_flag("--json", as_json);

    auto* verify = app.add_subcommand("verify", "decide a regular objective");
    verify->add_option("system", sys_path, "system JSON")->required();
    verify->add_option("objective", obj_path, "objective JSON")->required();
    verify->add_option("--engine", dopt.engine)->check(CLI::IsMember(engines));
    verify->add_flag("--xcheck", dopt.xcheck, "cross-check with the oracle");
    verify->add_option("--witness", dopt.witness_out, "write the witness JSON here");
    verify->add_flag("--json", dopt.as_json);

    auto* dead = app.add_subcommand("deadlock", "process, global or circular deadlock");
    std::string dead_proc;
    bool dead_global = false, dead_circular = false;
    dead->add_option("system", sys_path, "system JSON")->required();
    auto* o_proc = dead->add_option("--process", dead_proc, "process that should stop for good");
    auto* o_glob = dead->add_flag("--global", dead_global, "every process stops for good");
    auto* o_circ = dead->add_flag("--circular", dead_circular, "reachable cyclic wait (nested systems)");
    o_proc->excludes(o_glob, o_circ);
    o_glob->excludes(o_circ);
    dead->add_option("--engine", dopt.engine)->check(CLI::IsMember(engines));
    dead->add_flag("--xcheck", dopt.xcheck, "cross-check with the oracle");
    dead->add_option("--witness", dopt.witness_out, "write the witness JSON here");
    dead->add_flag("--json", dopt.as_json);

    auto* replay = app.add_subcommand("replay", "re-check a witness file");
    replay->add_option("system", sys_path, "system JSON")->required();
    replay->add_option("witness", witness_path, "witness JSON")->required();
    replay->add_option("--objective", obj_path, "objective JSON");

    auto* gen = app.add_subcommand("gen", "generate systems");
    gen->require_subcommand(1);
    gen->fallthrough();
    gen->add_option("-o,--output", out_path, "output file (default stdout)");
    int philo_n = 3;
    std::string left;
    auto* g_philo = gen->add_subcommand("philosophers", "dining philosophers");
    g_philo->add_option("n", philo_n)->required()->check(CLI::Range(2, 10000));
    g_philo->add_option("--left", left, "left-handed philosophers, e.g. 1,3");
    RandomParams rp;
    auto* g_rand = gen->add_subcommand("random", "random sound system");
    g_rand->add_option("--seed", rp.seed);
    g_rand->add_option("--processes", rp.processes)->check(CLI::Range(1, 64));
    g_rand->add_option("--states", rp.states)->check(CLI::Range(1, 1000));
    g_rand->add_option("--locks", rp.locks)->check(CLI::Range(1, kMaxLocks));
    g_rand->add_option("--max-locks", rp.max_locks)->check(CLI::Range(1, kMaxLocks));
    g_rand->add_option("--density", rp.density)->check(CLI::Range(0.0, 1.0));
    g_rand->add_flag("--exclusive", rp.exclusive);
    g_rand->add_flag("--nested", rp.nested);
    g_rand->add_flag("--two-lock", rp.two_lock);
    std::string cnf_path, obj_out;
    bool sat_exclusive = false;
    auto* g_sat = gen->add_subcommand("3sat", "3SAT hardness gadget from a DIMACS file");
    g_sat->add_option("cnf", cnf_path, "DIMACS CNF, 3 literals per clause")->required();
    g_sat->add_flag("--exclusive", sat_exclusive, "exclusive variant");
    g_sat->add_option("--objective-out", obj_out, "write the objective JSON here");
    std::string graph_path;
    int indset_k = 2;
    auto* g_ind = gen->add_subcommand("indset", "independent-set gadget");
    g_ind->add_option("graph", graph_path, "graph JSON {vertices, edges (1-based)}")->required();
    g_ind->add_option("k", indset_k)->required()->check(CLI::PositiveNumber);

    auto* dot = app.add_subcommand("export-dot", "DOT export");
    std::string dot_proc, dot_obj, dot_inf, stair_owns, stair_inf;
    bool dot_lock = false, dot_stair = false;
    int pattern_index = -1;
    dot->add_option("system", sys_path, "system JSON")->required();
    dot->add_option("--process", dot_proc, "only this process");
    dot->add_flag("--lock-graph", dot_lock, "lock graph of an exclusive 2LSS");
    dot->add_option("--objective", dot_obj, "objective automaton of --process");
    dot->add_option("--pattern", pattern_index, "pattern automaton of --process (index 0..22)");
    dot->add_flag("--stair", dot_stair, "stair-pattern automaton of --process");
    dot->add_option("--owns", stair_owns, "stair locks, lowest first");
    dot->add_option("--inf", stair_inf, "locks allowed in the periodic tail");
    dot->add_option("--inf-graph", dot_inf, "G_Inf of the certificate for this objective");
    dot->add_option("-o,--output", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*check) return cmd_check(parse_system(slurp(sys_path)), as_json);

        if (*verify) {
            System sys = parse_system(slurp(sys_path));
            ObjectiveFile of = parse_objective(slurp(obj_path), sys);
            Query q = is_process_deadlock(of) ? Query::ProcessDeadlock : Query::Objective;
            return decide(sys, of.objective, q, of.process, dopt);
        }

        if (*dead) {
            System sys = parse_system(slurp(sys_path));
            if (!dead_proc.empty()) {
                int p = find_proc(sys, dead_proc);
                return decide(sys, process_deadlock(sys, p), Query::ProcessDeadlock, p, dopt);
            }
            if (dead_global) return decide(sys, global_deadlock(sys), Query::GlobalDeadlock, -1, dopt);
            if (dead_circular) return decide(sys, universal(sys), Query::Circular, -1, dopt);
            throw InputError("deadlock needs one of --process, --global, --circular");
        }

        if (*replay) {
            System sys = parse_system(slurp(sys_path));
            std::optional<ObjectiveFile> of;
            if (!obj_path.empty()) of = parse_objective(slurp(obj_path), sys);
            Witness w = parse_witness(slurp(witness_path), sys);
            std::string why = replay_witness(sys, of ? &of->objective : nullptr, w);
            if (!why.empty()) {
                std::cout << "witness rejected: " << why << "\n";
                return kExitInput;
            }
            std::cout << "witness ok\n";
            return 0;
        }

        if (*gen) {
            if (*g_philo) {
                std::vector<int> l = split_ints(left);
                emit(serialize_system(philosophers(philo_n, {l.begin(), l.end()})), out_path);
            } else if (*g_rand) {
                emit(serialize_system(random_system(rp)), out_path);
            } else if (*g_sat) {
                SatInstance si = gen_3sat(parse_dimacs(slurp(cnf_path)), sat_exclusive);
                emit(serialize_system(si.sys), out_path);
                if (!obj_out.empty()) emit(serialize_objective(si.objective, si.sys), obj_out);
            } else if (*g_ind) {
                UGraph g = parse_graph(slurp(graph_path));
                if (indset_k > g.vertices) throw InputError("k exceeds the number of vertices");
                emit(serialize_system(gen_indset(g, indset_k).sys), out_path);
            }
            return 0;
        }

        if (*dot) {
            System sys = parse_system(slurp(sys_path));
            int p = dot_proc.empty() ? -1 : find_proc(sys, dot_proc);
            auto need_proc = [&](const char* what) {
                if (p < 0) throw InputError(std::string(what) + " needs --process");
                return p;
            };
            std::string text;
            if (dot_lock) {
                text = dot_lock_graph(build_lock_graph(sys), sys);
            } else if (!dot_inf.empty()) {
                ObjectiveFile of = parse_objective(slurp(dot_inf), sys);
                Verdict2 v = verify_2lss(sys, of.objective);
                text = dot_inf_graph(sys, v.certificate ? v.certificate->patterns : std::vector<Pattern2>{});
            } else if (!dot_obj.empty()) {
                ObjectiveFile of = parse_objective(slurp(dot_obj), sys);
                int q = need_proc("--objective");
                text = dot_dfa(of.objective.automata[q], sys.procs[q]);
            } else if (pattern_index >= 0) {
                const Process& pr = sys.procs[need_proc("--pattern")];
                auto all = all_patterns(lock_pair(pr));
                if (pattern_index >= static_cast<int>(all.size()))
                    throw InputError("pattern index out of range 0.." + std::to_string(all.size() - 1));
                text = dot_ela(build_pattern_ela(pr, all[pattern_index]));
            } else if (dot_stair) {
                const Process& pr = sys.procs[need_proc("--stair")];
                StairPattern sp;
                std::vector<int> order;
                for (const std::string& n : split_names(stair_owns)) {
                    int t = sys.find_lock(n);
                    if (t < 0) throw InputError("undeclared lock '" + n + "'");
                    sp.owns_seq.push_back(t);
                    order.push_back(t);
                }
                for (const std::string& n : split_names(stair_inf)) {
                    int t = sys.find_lock(n);
                    if (t < 0) throw InputError("undeclared lock '" + n + "'");
                    sp.inf_set |= bit(t);
                }
                for (int t : members(pr.locks()))
                    if (std::find(order.begin(), order.end(), t) == order.end()) order.push_back(t);
                text = dot_ela(build_stair_pattern_ela(pr, sp, order));
            } else if (p >= 0) {
                text = dot_process(sys.procs[p], sys);
            } else {
                text = dot_system(sys);
            }
            emit(text, out_path);
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Inapplicable& e) {
        std::cerr << "inapplicable (" << e.classifier() << "): " << e.what() << "\n";
        return kExitBudget;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    }
    return 0;
}
