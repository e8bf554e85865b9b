#pragma once

#include <string>
#include <vector>

#include "lss/core.hpp"
#include "lss/ela.hpp"
#include "lss/exclusive2.hpp"
#include "lss/generators.hpp"
#include "lss/nestedpat.hpp"
#include "lss/objective.hpp"
#include "lss/oracle.hpp"
#include "lss/patterns2.hpp"

namespace lss {

// ---------------------------------------------------------------- systems

/// Parses a system document. Action names are local to their process;
/// a qualified "proc.action" is accepted when proc is the owner. Errors
/// are InputError messages prefixed with the JSON path.
System parse_system(const std::string& text);
std::string serialize_system(const System& sys);

// ---------------------------------------------------------------- objectives

/// Objective plus the built-in it was made from, if any.
struct ObjectiveFile {
    Objective objective;
    std::string builtin;   // empty for explicit automata
    int process = -1;      // builtins about one process
    bool negated = false;
};

/// Either explicit automata + formula, or {"builtin": ..., "process",
/// "states", "negate"}. Missing automata are universal, missing
/// transitions go to a sink.
ObjectiveFile parse_objective(const std::string& text, const System& sys);
std::string serialize_objective(const Objective& obj, const System& sys);

/// True when the objective says exactly "process `process` deadlocks".
inline bool is_process_deadlock(const ObjectiveFile& f) {
    return f.builtin == "process-deadlock" && !f.negated;
}

// ---------------------------------------------------------------- witnesses

enum class WitnessKind { GlobalLasso, PatternCertificate, CircularDeadlock };

/// Serializable form of every engine's evidence.
struct Witness {
    WitnessKind kind = WitnessKind::GlobalLasso;
    GlobalLasso lasso;               // global-lasso
    std::vector<int> padded;         // global-lasso: processes idle in the loop
    std::string engine;              // pattern-certificate: patterns2 | nested
    std::size_t disjunct = 0;
    std::vector<int> order;          // lock order, lowest first
    std::vector<int> procs;          // processes described by `runs`
    std::vector<std::string> patterns;
    std::vector<LocalLasso> runs;
    std::vector<int> states;         // circular: state of each process
    std::vector<int> held;           // circular
    std::vector<int> needed;         // circular
};

Witness witness_of(const OracleResult& r);
Witness witness_of(const PatternCertificate& c, const System& sys);
Witness witness_of(const NestedCertificate& c, const System& sys);
Witness witness_of(const CircularDeadlock& c);

Witness parse_witness(const std::string& text, const System& sys);
std::string serialize_witness(const Witness& w, const System& sys);

/// Re-checks a witness against the system and objective: a global lasso
/// must be process fair and satisfy the objective; a certificate's runs
/// must be valid, schedulable and satisfy the objective. A circular
/// deadlock is checked by replaying its runs and the blocking condition.
/// Returns an empty string on success, otherwise the reason.
std::string replay_witness(const System& sys, const Objective* obj, const Witness& w);

// ---------------------------------------------------------------- formats

/// DIMACS CNF with exactly three literals per clause.
Cnf parse_dimacs(const std::string& text);
std::string serialize_dimacs(const Cnf& cnf);

/// {"vertices": n, "edges": [[u, v], ...]} with 1-based vertices.
UGraph parse_graph(const std::string& text);

// ---------------------------------------------------------------- DOT

std::string dot_process(const Process& p, const System& sys);
/// One cluster per process.
std::string dot_system(const System& sys);
std::string dot_dfa(const Dfa& d, const Process& p);
std::string dot_lock_graph(const LockGraph& g, const System& sys);
/// Undirected p-labelled edge between the two locks of every process
/// whose pattern is switching (drawn without arrowheads).
std::string dot_inf_graph(const System& sys, const std::vector<Pattern2>& patterns);
std::string dot_ela(const Ela& a);

}  // namespace lss
