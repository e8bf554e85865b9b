#include <doctest.h>

#include "lss/errors.hpp"
#include "lss/generators.hpp"
#include "lss/oracle.hpp"
#include "support.hpp"

using namespace lss;

TEST_CASE("two copies of the example deadlock globally") {
    System sys = test::fig1_system({"p", "q"});
    OracleResult r = explore_verify(sys, global_deadlock(sys));
    REQUIRE(r.yes);
    REQUIRE(r.witness);
    CHECK(r.witness->loop.empty());
    CHECK(is_process_fair(sys, *r.witness));
    CHECK(lasso_satisfies(sys, *r.witness, global_deadlock(sys)));
    CHECK_FALSE(explore_verify(sys, complement(global_deadlock(sys))).yes);
}

TEST_CASE("a single copy runs forever") {
    System sys = test::fig1_system({"p"});
    OracleResult r = explore_verify(sys, complement(process_deadlock(sys, 0)));
    REQUIRE(r.yes);
    CHECK_FALSE(r.witness->loop.empty());
    CHECK(is_process_fair(sys, *r.witness));
    CHECK_FALSE(explore_verify(sys, process_deadlock(sys, 0)).yes);
}

TEST_CASE("process fairness") {
    System sys = philosophers(2);
    // p1 eats forever while p2 could move: unfair
    GlobalLasso unfair{{}, {{0, 0}, {0, 1}, {0, 2}, {0, 3}}};
    CHECK_FALSE(is_process_fair(sys, unfair));
    GlobalLasso fair{{}, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}, {1, 3}}};
    CHECK(is_process_fair(sys, fair));
    GlobalLasso stuck{{{0, 0}, {1, 0}}, {}};
    CHECK(is_process_fair(sys, stuck));
    GlobalLasso early{{{0, 0}}, {}};
    CHECK_FALSE(is_process_fair(sys, early));
}

TEST_CASE("scheduling fixed local runs") {
    System sys = philosophers(2);
    std::vector<LocalLasso> both_first{{{0}, {}}, {{0}, {}}};
    CHECK(can_schedule(sys, both_first));
    std::vector<LocalLasso> one_eats{{{}, {0, 1, 2, 3}}, {{0}, {}}};
    CHECK_FALSE(can_schedule(sys, one_eats));
    std::vector<LocalLasso> both_eat{{{}, {0, 1, 2, 3}}, {{}, {0, 1, 2, 3}}};
    CHECK(can_schedule(sys, both_eat));
}

TEST_CASE("budget") {
    System sys = philosophers(8);
    Budget b;
    b.states = 10;
    CHECK_THROWS_AS(explore_verify(sys, global_deadlock(sys), b), BudgetExceeded);
}

TEST_CASE("philosophers") {
    for (int n = 2; n <= 4; ++n) {
        System sym = philosophers(n);
        CHECK(explore_verify(sym, global_deadlock(sym)).yes);
        System left = philosophers(n, {1});
        CHECK_FALSE(explore_verify(left, global_deadlock(left)).yes);
        CHECK_FALSE(explore_verify(left, process_deadlock(left, 0)).yes);
    }
}
