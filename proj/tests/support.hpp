#pragma once

#include <random>
#include <string>
#include <vector>

#include "lss/core.hpp"
#include "lss/ela.hpp"
#include "lss/generators.hpp"
#include "lss/objective.hpp"

namespace lss::test {

/// The six-state two-lock process of the running example: get t1, get t2,
/// rel t1, get t1, rel t2, get t2 back to state 3.
Process fig1_process(const System& sys, const std::string& name);
/// Locks t1, t2 and one copy of the process per name.
System fig1_system(const std::vector<std::string>& names);

/// Random executable lasso of p with stem and loop of at most `max_len`
/// actions; finite when no loop closes within reach.
LocalLasso random_local_lasso(const Process& p, std::mt19937_64& rng, int max_len = 6);

/// Built-in objectives used by the differential suites.
std::vector<Objective> builtin_objectives(const System& sys);

bool brute_force_sat(const Cnf& cnf);
bool has_independent_set(const UGraph& g, int k);

/// One representative per isomorphism class of graphs on n vertices with
/// every degree <= max_degree.
std::vector<UGraph> graphs_up_to_iso(int n, int max_degree);

/// Random automaton with a random acceptance formula over its states.
Ela random_ela(std::mt19937_64& rng, int max_states, int letters);

/// Non-emptiness by enumerating every reachable state set that some
/// cycle can visit exactly.
bool ela_nonempty_by_enumeration(const Ela& a);

/// Checks the lasso against the transitions and the acceptance formula
/// without using the library's emptiness code.
bool ela_lasso_replays(const Ela& a, const ElaLasso& l);

}  // namespace lss::test
