#include <doctest.h>

#include <random>

#include "lss/errors.hpp"
#include "lss/generators.hpp"
#include "lss/nestedpat.hpp"
#include "lss/oracle.hpp"
#include "support.hpp"

using namespace lss;

namespace {

/// get a, get b, rel b, get c, rel c, back to holding a; never drops a.
System stair_system() {
    System sys;
    int a = sys.add_lock("a"), b = sys.add_lock("b"), c = sys.add_lock("c");
    Process p;
    p.name = "p";
    int s0 = p.add_state("0"), s1 = p.add_state("1"), s2 = p.add_state("2"), s3 = p.add_state("3");
    p.add_transition(s0, p.add_action("ga", LockOp::get(a)), s1);
    p.add_transition(s1, p.add_action("gb", LockOp::get(b)), s2);
    p.add_transition(s2, p.add_action("rb", LockOp::rel(b)), s1);
    p.add_transition(s1, p.add_action("gc", LockOp::get(c)), s3);
    p.add_transition(s3, p.add_action("rc", LockOp::rel(c)), s1);
    sys.procs.push_back(p);
    return sys;
}

}  // namespace

TEST_CASE("stair decomposition") {
    System sys = stair_system();
    const Process& p = sys.procs[0];
    StairDecomposition d = stair_decompose(p, {{0}, {1, 2, 3, 4}});
    CHECK(d.stairs == std::vector<int>{0});
    CHECK(d.stair_locks == std::vector<int>{0});
    CHECK(d.minimal.owns_seq == std::vector<int>{0});
    CHECK(d.minimal.inf_set == (bit(1) | bit(2)));
    CHECK(std::find(d.constraints.begin(), d.constraints.end(), std::pair{0, 1}) != d.constraints.end());
    CHECK(to_string(d.minimal, sys) == "owns=(a) inf={b,c}");

    StairDecomposition fin = stair_decompose(p, {{0, 1}, {}});
    CHECK(fin.stair_locks == std::vector<int>{0, 1});

    CHECK_THROWS_AS(stair_decompose(test::fig1_process(test::fig1_system({}), "p"), {{0, 1, 2}, {}}),
                    InputError);
}

TEST_CASE("stair automaton accepts its own runs") {
    for (int seed = 1; seed <= 30; ++seed) {
        RandomParams prm;
        prm.seed = seed;
        prm.processes = 1;
        prm.states = 6;
        prm.locks = 3;
        prm.max_locks = 3;
        prm.nested = true;
        prm.density = 0.7;
        System sys = random_system(prm);
        const Process& p = sys.procs[0];
        const int pad = static_cast<int>(p.actions.size());
        std::mt19937_64 rng(seed);
        for (int i = 0; i < 10; ++i) {
            LocalLasso run = test::random_local_lasso(p, rng);
            StairEntry e = stair_entry_of(p, run);
            std::vector<int> order = stair_order({e}, static_cast<int>(sys.locks.size()));
            REQUIRE_FALSE(order.empty());
            std::vector<int> local;
            for (int t : order)
                if (has(p.locks(), t)) local.push_back(t);
            // the recogniser needs the tail set closed upwards in the order
            StairPattern widened = e.pattern;
            bool past = e.pattern.owns_seq.empty();
            for (int t : local) {
                if (past) widened.inf_set |= bit(t);
                if (!e.pattern.owns_seq.empty() && t == e.pattern.owns_seq.back()) past = true;
            }
            Ela a = build_stair_pattern_ela(p, widened, local);
            std::vector<int> loop = run.finite() ? std::vector<int>{pad} : run.loop;
            CHECK(accepts(a, run.stem, loop));
            std::size_t n = local.size();
            CHECK(a.size() <= (n + 2) * (n + 2));
        }
    }
}

TEST_CASE("stair compatibility") {
    System sys = philosophers(2);
    auto e1 = stair_entry_of(sys.procs[0], {{0}, {}});
    auto e2 = stair_entry_of(sys.procs[1], {{0}, {}});
    auto order = stair_order({e1, e2}, 2);
    REQUIRE_FALSE(order.empty());
    CHECK(check_stair_compatible({e1, e2}, order).ok);

    auto both = stair_entry_of(sys.procs[0], {{0, 1}, {}});
    StairCompatibility c = check_stair_compatible({both, e2}, order);
    CHECK_FALSE(c.ok);
    CHECK(c.violated == 1);
}

TEST_CASE("nested verifier") {
    System sys = stair_system();
    CHECK(verify_nested(sys, complement(process_deadlock(sys, 0))).yes);
    CHECK_FALSE(verify_nested(sys, process_deadlock(sys, 0)).yes);
    for (int n = 2; n <= 4; ++n) {
        System philo = philosophers(n);
        VerdictNested v = verify_nested(philo, global_deadlock(philo));
        REQUIRE(v.yes);
        REQUIRE(v.certificate);
        CHECK(can_schedule(philo, v.certificate->runs));
        System left = philosophers(n, {n});
        CHECK_FALSE(verify_nested(left, global_deadlock(left)).yes);
    }
    try {
        verify_nested(test::fig1_system({"p"}), universal(test::fig1_system({"p"})));
        FAIL("expected Inapplicable");
    } catch (const Inapplicable& e) {
        CHECK(e.classifier() == "nested");
    }
}

TEST_CASE("circular deadlock") {
    auto c = detect_circular_deadlock(philosophers(3));
    REQUIRE(c);
    CHECK(c->procs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(c->needed[i] == c->held[(i + 1) % 3]);
    CHECK_FALSE(detect_circular_deadlock(philosophers(3, {2})));

    UGraph p3{3, {{0, 1}, {1, 2}}};
    CHECK(detect_circular_deadlock(gen_indset(p3, 2).sys));
    UGraph k3{3, {{0, 1}, {0, 2}, {1, 2}}};
    CHECK_FALSE(detect_circular_deadlock(gen_indset(k3, 2).sys));
}
