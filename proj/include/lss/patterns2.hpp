#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lss/core.hpp"
#include "lss/ela.hpp"
#include "lss/objective.hpp"

namespace lss {

/// Summary of a local run of a two-lock process.
struct Pattern2 {
    bool infinitary = false;
    bool strong = false;
    LockSet owns = 0;                 // finitary: locks held at the end
    std::vector<LockSet> inf_sets;    // infinitary: sorted, duplicate free

    /// Locks kept forever: `owns`, or the intersection of `inf_sets`.
    LockSet owned() const;
    bool switching() const;
    /// Union of the infinitely recurring lock sets (0 when finitary).
    LockSet inf_union() const;

    static Pattern2 finitary(LockSet owns, bool strong = false) { return {false, strong, owns, {}}; }
    static Pattern2 infinite(std::vector<LockSet> sets, bool strong = false);

    bool operator==(const Pattern2&) const = default;
};

std::string to_string(const Pattern2& p, const System& sys);

/// The two locks of a process (lower id first); throws Inapplicable if
/// |T_p| != 2.
std::array<int, 2> lock_pair(const Process& p);

/// Pattern of u.v^omega (finite run when v is empty). Throws InputError
/// for an invalid run or a process with more than two locks.
Pattern2 pattern_of_local_lasso(const Process& p, const LocalLasso& run);

/// All 23 patterns over the pair, finitary ones first, switching last.
std::vector<Pattern2> all_patterns(std::array<int, 2> pair);

/// 12-state recogniser over p's actions + PAD of the padded runs of p
/// with the given pattern. p must have exactly two locks.
Ela build_pattern_ela(const Process& p, const Pattern2& pat);

struct PatternEntry {
    Pattern2 pattern;
    std::array<int, 2> locks{};
    bool end_has_non_get = false;  // finitary: end state has a non-Get exit
    LockSet blocks = 0;            // finitary: locks acquirable at the end
};

struct Compatibility {
    bool ok = true;
    int violated = 0;              // failed condition 1..6, 0 if ok
    std::string reason;
    std::vector<int> order;        // total lock order when ok (locks 0..n-1)
};

/// The scheduling criterion for a family of 2-lock patterns. `nlocks`
/// is |T| (used to extend the order witness).
Compatibility check_patterns_compatible(const std::vector<PatternEntry>& entries, int nlocks);

/// Entry for a concrete local lasso of p (pattern, end-state flags).
PatternEntry entry_of(const Process& p, const LocalLasso& run);

struct PatternCertificate {
    std::vector<Pattern2> patterns;
    std::vector<LocalLasso> runs;
    std::vector<int> order;
    std::size_t disjunct = 0;
};

struct Verdict2 {
    bool yes = false;
    std::optional<PatternCertificate> certificate;
};

/// NP procedure for sound 2LSS (|T_p| <= 2, padded with phantom locks).
/// Throws Inapplicable when the system is not sound or not 2-lock.
Verdict2 verify_2lss(const System& sys, const Objective& obj);

}  // namespace lss
