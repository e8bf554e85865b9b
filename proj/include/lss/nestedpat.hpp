#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lss/core.hpp"
#include "lss/ela.hpp"
#include "lss/objective.hpp"

namespace lss {

/// Locks kept for good, in acquisition order, and locks allowed in the
/// periodic tail.
struct StairPattern {
    std::vector<int> owns_seq;
    LockSet inf_set = 0;
    bool operator==(const StairPattern&) const = default;
};

std::string to_string(const StairPattern& p, const System& sys);

struct StairDecomposition {
    /// The run with the loop rotated so that it starts and ends holding
    /// exactly the stair locks (same omega-word as the input).
    LocalLasso run;
    std::vector<std::vector<int>> segments;  // w_0 .. w_k, all neutral
    std::vector<int> stairs;                 // a_1 .. a_k
    std::vector<int> stair_locks;            // t_1 .. t_k
    std::vector<std::vector<int>> tail;      // one loop iteration in neutral blocks
    StairPattern minimal;                    // (stair locks, locks acquired in the loop)
    /// t_i -> t' for every lock t' operated after a_i (deduplicated).
    std::vector<std::pair<int, int>> constraints;
};

/// Throws InputError if the run is invalid or not nested.
StairDecomposition stair_decompose(const Process& p, const LocalLasso& run);

/// Recogniser over p's actions + PAD of the padded nested runs matching
/// `pat` under `order` (lowest lock first; must list every lock of p).
/// Throws InputError when owns_seq is not increasing in `order`.
Ela build_stair_pattern_ela(const Process& p, const StairPattern& pat, const std::vector<int>& order);

/// A concrete run summarised for the scheduling criterion.
struct StairEntry {
    StairPattern pattern;
    std::vector<std::pair<int, int>> constraints;
    bool finite = false;
    bool end_gets_only = true;  // finite: every exit of the end state is a Get
    LockSet end_gets = 0;       // finite: locks those exits acquire
};

StairEntry stair_entry_of(const Process& p, const LocalLasso& run);

struct StairCompatibility {
    bool ok = true;
    int violated = 0;  // 1 disjoint-owns, 2 common-order, 3 blocked-end, 4 owns-inf-disjoint
    std::string reason;
};

/// The scheduling criterion for nested runs under one total order.
StairCompatibility check_stair_compatible(const std::vector<StairEntry>& entries,
                                          const std::vector<int>& order);

/// Some total order on 0..nlocks-1 extending every entry's constraints,
/// or empty when they are cyclic.
std::vector<int> stair_order(const std::vector<StairEntry>& entries, int nlocks);

struct NestedCertificate {
    std::vector<StairPattern> patterns;
    std::vector<LocalLasso> runs;
    std::vector<int> order;
    std::size_t disjunct = 0;
};

struct VerdictNested {
    bool yes = false;
    std::optional<NestedCertificate> certificate;
};

/// NP procedure for sound nested systems. Throws Inapplicable on an
/// unsound or non-nested system, BudgetExceeded when the order space had
/// to be truncated and no certificate was found.
VerdictNested verify_nested(const System& sys, const Objective& obj);

struct CircularDeadlock {
    std::vector<int> procs;
    std::vector<int> states;
    std::vector<int> held;    // t_i, held by procs[i]
    std::vector<int> needed;  // t_{i+1}
    std::vector<LocalLasso> runs;  // finite runs of procs[i] to states[i]
    std::vector<int> order;
};

/// Reachable configuration where procs[i] holds needed[i-1] and every exit
/// of its state acquires needed[i], cyclically. Same preconditions as
/// verify_nested.
std::optional<CircularDeadlock> detect_circular_deadlock(const System& sys);

}  // namespace lss
