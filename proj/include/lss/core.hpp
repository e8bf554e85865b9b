#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lss {

using LockSet = std::uint64_t;
inline constexpr int kMaxLocks = 64;

inline LockSet bit(int lock) { return LockSet{1} << lock; }
inline bool has(LockSet s, int lock) { return (s >> lock) & 1U; }
int popcount(LockSet s);
/// Lock ids in increasing order.
std::vector<int> members(LockSet s);

enum class OpKind : std::uint8_t { Get, Rel, Nop };

struct LockOp {
    OpKind kind = OpKind::Nop;
    int lock = -1;

    static LockOp get(int t) { return {OpKind::Get, t}; }
    static LockOp rel(int t) { return {OpKind::Rel, t}; }
    static LockOp nop() { return {OpKind::Nop, -1}; }
    bool operator==(const LockOp&) const = default;
};

struct Edge {
    int action;
    int to;
};

/// One finite-state process. Transitions are a partial map
/// (state, action) -> state; every action carries one lock operation.
struct Process {
    std::string name;
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<LockOp> ops;               // indexed by action
    std::vector<std::vector<Edge>> out;    // indexed by state, sorted by action
    int initial = 0;
    LockSet phantom = 0;                   // padding locks, never operated on

    int add_state(const std::string& s);
    int add_action(const std::string& a, LockOp op);
    void add_transition(int from, int action, int to);

    int find_state(const std::string& s) const;   // -1 if absent
    int find_action(const std::string& a) const;  // -1 if absent
    std::optional<int> next(int state, int action) const;
    const LockOp& op(int action) const { return ops[action]; }

    /// T_p: locks touched by some operation, plus phantom locks.
    LockSet locks() const;
    /// Locks acquired by some outgoing transition of `state`.
    LockSet gettable(int state) const;
    /// True iff every outgoing transition of `state` acquires a lock in
    /// `within` (vacuously true for states without outgoing transitions).
    bool all_get_in(int state, LockSet within) const;
    std::size_t num_transitions() const;
};

struct System {
    std::vector<std::string> locks;
    std::vector<Process> procs;

    int add_lock(const std::string& name);
    int find_lock(const std::string& name) const;
    int find_process(const std::string& name) const;
    /// Throws InputError if the system is not well formed.
    void validate() const;
};

struct Move {
    int proc;
    int action;
    bool operator==(const Move&) const = default;
};

struct GlobalConfig {
    std::vector<int> state;
    std::vector<LockSet> held;
    bool operator==(const GlobalConfig&) const = default;
};

/// Ultimately periodic global run stem . loop^omega; an empty loop is a
/// finite run.
struct GlobalLasso {
    std::vector<Move> stem;
    std::vector<Move> loop;
};

/// Ultimately periodic local run of one process (action ids).
struct LocalLasso {
    std::vector<int> stem;
    std::vector<int> loop;
    bool finite() const { return loop.empty(); }
};

// ---------------------------------------------------------------- semantics

enum class Blocked { None, NoTransition, HeldByOther, NotHeld, HeldBySelf };
const char* to_string(Blocked b);

GlobalConfig initial_config(const System& sys);

/// Applies (p, a); returns nullopt and sets `why` when the move is disabled.
std::optional<GlobalConfig> step(const System& sys, const GlobalConfig& cfg,
                                 Move m, Blocked* why = nullptr);
/// Whether (p,a) can fire, without building the successor.
Blocked can_fire(const System& sys, const GlobalConfig& cfg, Move m);
std::vector<Move> enabled_moves(const System& sys, const GlobalConfig& cfg);
bool process_enabled(const System& sys, const GlobalConfig& cfg, int proc);

/// Trace of configurations (size = moves + 1). Throws InputError naming
/// the first invalid index.
std::vector<GlobalConfig> execute(const System& sys, const std::vector<Move>& moves);
std::vector<int> project(const std::vector<Move>& run, int proc);

struct LocalStep {
    int state;
    LockSet held;
};
/// Executes local actions of one process from (init, {}); throws
/// InputError if some action cannot fire in isolation.
std::vector<LocalStep> execute_local(const Process& p, const std::vector<int>& actions);
/// Checks a local lasso: executable, and held set/state agree at the
/// loop boundary.
void validate_local_lasso(const Process& p, const LocalLasso& l);

// ---------------------------------------------------------------- classifiers

struct SoundViolation {
    int proc = -1;
    int state = -1;
    int action = -1;
    std::string reason;  // conflicting-owns | get-held | rel-not-held
};

struct SoundReport {
    bool sound = true;
    /// owns[p][s]; meaningful only where reachable[p][s].
    std::vector<std::vector<LockSet>> owns;
    std::vector<std::vector<bool>> reachable;
    std::optional<SoundViolation> violation;
};
SoundReport check_sound(const System& sys);

struct ExclusiveReport {
    bool exclusive = true;
    int proc = -1;
    int state = -1;
};
ExclusiveReport check_exclusive(const System& sys);

struct TwoLockReport {
    bool two_lock = true;
    std::vector<int> lock_count;  // |T_p| before padding
    int proc = -1;                // first process with |T_p| >= 3
};
TwoLockReport check_2lss(const System& sys);

/// System with every |T_p| <= 1 padded to 2 with fresh private locks.
struct TwoLockView {
    System sys;
    std::vector<std::array<int, 2>> pair;  // T_p = {pair[p][0] < pair[p][1]}
};
/// Throws Inapplicable if some |T_p| >= 3.
TwoLockView pad_to_two_locks(const System& sys);

struct NestedReport {
    bool nested = true;
    int proc = -1;
    std::vector<int> witness;  // shortest local run ending in the bad release
};
NestedReport check_nested(const System& sys, std::size_t budget = 1'000'000);

}  // namespace lss
