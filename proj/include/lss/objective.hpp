#pragma once

#include <string>
#include <vector>

#include "lss/core.hpp"
#include "lss/ela.hpp"
#include "lss/formula.hpp"

namespace lss {

/// Reserved name of the padding letter.
inline constexpr const char* kPad = "#pad";
inline constexpr const char* kSink = "_sink";

/// Deterministic automaton over one process alphabet. Letters are the
/// process's action ids; letter `pad_letter()` is PAD. A missing entry
/// (-1) is allowed until `complete` is called.
struct Dfa {
    std::vector<std::string> states;
    int initial = 0;
    int letters = 0;                     // number of letters including PAD
    std::vector<std::vector<int>> delta; // [state][letter]

    int pad_letter() const { return letters - 1; }
    int add_state(const std::string& name);
    int find_state(const std::string& name) const;
    int next(int state, int letter) const { return delta[state][letter]; }
    bool total() const;
};

/// Blank automaton for process p (no states yet).
Dfa blank_dfa(const Process& p);
/// Sends every missing transition to an absorbing "_sink" state.
void complete(Dfa& d);

/// Atom encoding for inf(p, s).
inline int inf_atom(int proc, int state) { return (proc << 20) | state; }
inline int atom_proc(int atom) { return atom >> 20; }
inline int atom_state(int atom) { return atom & ((1 << 20) - 1); }

/// One total DFA per process plus a formula over inf(p,s) atoms.
struct Objective {
    std::vector<Dfa> automata;
    Formula phi = Formula::truth();

    /// Throws InputError on a missing/partial automaton or a dangling atom.
    void validate(const System& sys) const;
};

/// Every automaton is the one-state universal automaton; phi = true.
Objective universal(const System& sys);
/// p's local run is finite: B_p reaches "done" on PAD.
Objective process_deadlock(const System& sys, int proc);
/// Every process has a finite local run.
Objective global_deadlock(const System& sys);
/// p's run eventually stays in (or keeps returning to) one of `targets`.
Objective local_reach_forever(const System& sys, int proc, const std::vector<int>& targets);

Objective complement(Objective o);
/// Per-process product automata, phi1 & phi2 with atoms remapped.
Objective conjoin(const Objective& a, const Objective& b, std::size_t budget = 100'000);

/// States on the PAD-cycle reached from `state` (sorted).
std::vector<int> pad_cycle(const Dfa& d, int state);

/// States visited infinitely often when the automaton reads
/// stem . loop^omega (loop nonempty); for an empty loop, PAD^omega is
/// read after the stem.
std::vector<int> recurrent_states(const Dfa& d, const std::vector<int>& stem,
                                  const std::vector<int>& loop);

/// Per-process conjunctions of a global disjunct (state ids, not atoms).
std::vector<Literals> split_by_process(const Literals& c, std::size_t nprocs);

/// The DFA as an automaton over `p`'s actions + PAD whose acceptance
/// requires exactly the literal constraints in `local`.
Ela dfa_ela(const Dfa& d, const Process& p, const Literals& local);

/// Letters of a process automaton: its actions followed by PAD.
std::vector<std::string> padded_letters(const Process& p);
/// The process as an automaton over actions + PAD with a PAD self-loop
/// on every state where `pad_ok[state]` holds; acceptance is true.
Ela process_ela(const Process& p, const std::vector<char>& pad_ok);

/// Text form: inf(PROC,STATE), !, &, |, parentheses, true, false.
Formula parse_formula(const std::string& text, const System& sys, const Objective& o);
std::string format_formula(const Formula& f, const System& sys, const Objective& o);

}  // namespace lss
