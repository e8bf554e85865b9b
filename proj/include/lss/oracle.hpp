#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lss/core.hpp"
#include "lss/objective.hpp"

namespace lss {

/// Exploration caps for the brute-force engines.
struct Budget {
    std::size_t states = 2'000'000;
    std::size_t transitions = 10'000'000;

    /// Defaults, overridden by LSS_BUDGET="states[,transitions]".
    static Budget from_env();
};

struct OracleResult {
    bool yes = false;
    std::optional<GlobalLasso> witness;
    std::vector<int> padded;        // processes without a move in the loop
    std::size_t states = 0;         // product states explored
};

/// Searches the product of the system with the objective automata for a
/// process-fair lasso satisfying phi. Throws BudgetExceeded.
OracleResult explore_verify(const System& sys, const Objective& obj,
                            const Budget& budget = Budget::from_env());

/// Whether the fixed local lassos interleave into a process-fair global
/// run. Each lasso must be valid for its process.
bool can_schedule(const System& sys, const std::vector<LocalLasso>& runs,
                  const Budget& budget = Budget::from_env());

/// Whether stem . loop^omega is executable and every process that does
/// not move in the loop is disabled at every configuration of the loop
/// (at the final configuration when the loop is empty).
bool is_process_fair(const System& sys, const GlobalLasso& l);
/// Evaluates phi on the projections of the lasso (padded where finite).
/// Throws InputError when the lasso is not executable.
bool lasso_satisfies(const System& sys, const GlobalLasso& l, const Objective& obj);

}  // namespace lss
