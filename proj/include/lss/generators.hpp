#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lss/core.hpp"
#include "lss/objective.hpp"

namespace lss {

/// Dining philosophers p1..pn; p_i takes f_i then f_{i+1 mod n}, releases
/// in reverse and loops. Left-handed philosophers (1-based indices) take
/// the right fork first.
System philosophers(int n, const std::set<int>& left_handed = {});

struct RandomParams {
    std::uint64_t seed = 1;
    int processes = 2;
    int states = 4;          // per process, upper bound
    int locks = 3;           // size of the shared pool
    int max_locks = 3;       // per process (forced to 2 with two_lock)
    double density = 0.5;    // controls the number of exits per state
    bool exclusive = false;
    bool nested = false;
    bool two_lock = false;
};
/// Sound by construction (every state carries its owns set).
System random_system(const RandomParams& prm);

/// 3-literal clauses over variables 1..n; literal -k is the negation of x_k.
using Cnf = std::vector<std::array<int, 3>>;

struct SatInstance {
    System sys;
    Objective objective;   // the distinguished process deadlocks (plus side conditions)
    int target = 0;        // index of the distinguished process p
};
/// Hardness gadget: the objective is satisfiable iff the CNF is. The
/// exclusive variant splits the non-exclusive choice states and adds
/// liveness side conditions to the objective.
SatInstance gen_3sat(const Cnf& cnf, bool exclusive);

struct UGraph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;  // 0-based, u < v
};

struct IndsetInstance {
    System sys;
    int k = 0;             // number of processes in the gadget
};
/// Nested exclusive gadget with a circular deadlock iff `g` has an
/// independent set of size k. For k = 1 the gadget is built for k = 2 on
/// `g` plus an isolated vertex. Isolated vertices carry a private lock.
IndsetInstance gen_indset(const UGraph& g, int k);
/// Largest number of locks held along one branch of the gadget.
int max_branch_locks(const UGraph& g);

}  // namespace lss
