#include <doctest.h>

#include "lss/errors.hpp"
#include "lss/exclusive2.hpp"
#include "lss/generators.hpp"
#include "lss/oracle.hpp"
#include "support.hpp"

using namespace lss;

TEST_CASE("lock graph of the two-copy example") {
    System sys = test::fig1_system({"p", "q"});
    LockGraph g = build_lock_graph(sys);
    CHECK(g.locks == 2);
    CHECK(g.edges.size() == 4);
    for (const LockEdge& e : g.edges) CHECK(e.from != e.to);
}

TEST_CASE("lock graph of philosophers") {
    LockGraph g = build_lock_graph(philosophers(3));
    CHECK(g.edges == std::vector<LockEdge>{{0, 1, 0}, {1, 2, 1}, {2, 0, 2}});
    LockGraph l = build_lock_graph(philosophers(3, {3}));
    CHECK(l.edges == std::vector<LockEdge>{{0, 1, 0}, {0, 2, 2}, {1, 2, 1}});
}

TEST_CASE("forever pairs") {
    System sys = test::fig1_system({"p"});
    // each lock is dropped somewhere on the cycle and no state is dead
    CHECK(forever_pairs(sys).empty());
    System philo = philosophers(2);
    CHECK(forever_pairs(philo).empty());
}

TEST_CASE("conditions on small systems") {
    System sym = philosophers(3);
    PtimeVerdict v = process_deadlock_ptime(sym, 0);
    CHECK(v.yes);
    CHECK(v.condition == "Cx2");
    CHECK_FALSE(v.path.empty());

    System left = philosophers(3, {3});
    for (int p = 0; p < 3; ++p) CHECK_FALSE(process_deadlock_ptime(left, p).yes);

    // one copy of the example next to a process that takes t1 and stops
    System sys = test::fig1_system({"p"});
    Process h;
    h.name = "h";
    int a = h.add_state("a"), b = h.add_state("b");
    h.add_transition(a, h.add_action("grab", LockOp::get(0)), b);
    sys.procs.push_back(h);
    PtimeVerdict w = process_deadlock_ptime(sys, 0);
    CHECK(w.yes);
    REQUIRE(w.pair);
    CHECK(w.pair->proc == 1);
    CHECK(explore_verify(sys, process_deadlock(sys, 0)).yes);

    PtimeVerdict dead = process_deadlock_ptime(sys, 1);
    CHECK(dead.yes);
    CHECK(dead.condition == "Cx1");
}

TEST_CASE("preconditions") {
    SatInstance si = gen_3sat({{1, 1, 1}}, false);
    try {
        build_lock_graph(si.sys);
        FAIL("expected Inapplicable");
    } catch (const Inapplicable& e) {
        CHECK(e.classifier() == "exclusive");
    }
    CHECK_THROWS_AS(process_deadlock_ptime(philosophers(2), 5), InputError);
}
