#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lss/core.hpp"

namespace lss {

/// Edge from -(proc)-> to: proc can hold exactly `from` while every exit
/// of its state acquires `to`.
struct LockEdge {
    int from;
    int to;
    int proc;
    bool operator==(const LockEdge&) const = default;
};

struct LockGraph {
    int locks = 0;
    std::vector<LockEdge> edges;  // sorted, duplicate free
};

/// Throws Inapplicable unless the system is sound, exclusive and 2-lock.
LockGraph build_lock_graph(const System& sys);

enum class ForeverKind { InfiniteKeeper, DeadHolder };

/// Process `proc` can keep `lock` for good.
struct ForeverPair {
    int proc;
    int lock;
    ForeverKind kind;
    bool operator==(const ForeverPair&) const = default;
};

/// Throws Inapplicable on an unsound system.
std::vector<ForeverPair> forever_pairs(const System& sys);

struct PtimeVerdict {
    bool yes = false;
    std::string condition;            // "Cx1".."Cx4", empty for No
    int state = -1;                   // Cx1: dead state of p
    int lock = -1;                    // lock p ends up waiting for
    std::vector<int> path;            // locks from `lock` along G
    std::optional<ForeverPair> pair;  // Cx3/Cx4
};

/// Whether p has a process-fair run in which it stops for good.
/// Polynomial; throws Inapplicable unless sound, exclusive and 2-lock.
PtimeVerdict process_deadlock_ptime(const System& sys, int proc);

}  // namespace lss
