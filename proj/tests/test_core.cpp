#include <doctest.h>

#include <random>

#include "lss/core.hpp"
#include "lss/errors.hpp"
#include "lss/generators.hpp"
#include "support.hpp"

using namespace lss;

TEST_CASE("owns of the six-state example") {
    System sys = test::fig1_system({"p"});
    SoundReport sr = check_sound(sys);
    REQUIRE(sr.sound);
    const LockSet t1 = bit(0), t2 = bit(1);
    std::vector<LockSet> want{0, t1, t1 | t2, t2, t1 | t2, t1};
    for (int s = 0; s < 6; ++s) {
        CHECK(sr.reachable[0][s]);
        CHECK(sr.owns[0][s] == want[s]);
    }
}

TEST_CASE("soundness violations") {
    System sys;
    int t = sys.add_lock("t");
    Process p;
    p.name = "p";
    int a = p.add_state("a"), b = p.add_state("b");
    int rel = p.add_action("rel", LockOp::rel(t));
    p.add_transition(a, rel, b);
    sys.procs.push_back(p);
    SoundReport sr = check_sound(sys);
    CHECK_FALSE(sr.sound);
    REQUIRE(sr.violation);
    CHECK(sr.violation->reason == "rel-not-held");

    System two;
    int u = two.add_lock("u");
    Process q;
    q.name = "q";
    int s0 = q.add_state("0"), s1 = q.add_state("1");
    int g = q.add_action("g", LockOp::get(u)), n = q.add_action("n", LockOp::nop());
    q.add_transition(s0, g, s1);
    q.add_transition(s0, n, s1);
    two.procs.push_back(q);
    sr = check_sound(two);
    CHECK_FALSE(sr.sound);
    CHECK(sr.violation->reason == "conflicting-owns");

    CHECK(check_sound(System{}).sound);
}

TEST_CASE("exclusive and two-lock classifiers") {
    CHECK(check_exclusive(test::fig1_system({"p"})).exclusive);
    System sys;
    int t1 = sys.add_lock("t1");
    sys.add_lock("t2");
    sys.add_lock("t3");
    Process p;
    p.name = "p";
    int s = p.add_state("s"), x = p.add_state("x");
    p.add_transition(s, p.add_action("g", LockOp::get(t1)), x);
    p.add_transition(s, p.add_action("n", LockOp::nop()), x);
    sys.procs.push_back(p);
    ExclusiveReport ex = check_exclusive(sys);
    CHECK_FALSE(ex.exclusive);
    CHECK(ex.state == s);

    CHECK(check_2lss(philosophers(3)).two_lock);
    Process r;
    r.name = "r";
    int a = r.add_state("a"), b = r.add_state("b"), c = r.add_state("c"), d = r.add_state("d");
    r.add_transition(a, r.add_action("g1", LockOp::get(0)), b);
    r.add_transition(b, r.add_action("g2", LockOp::get(1)), c);
    r.add_transition(c, r.add_action("g3", LockOp::get(2)), d);
    sys.procs.push_back(r);
    TwoLockReport tl = check_2lss(sys);
    CHECK_FALSE(tl.two_lock);
    CHECK(tl.lock_count[1] == 3);
    CHECK_THROWS_AS(pad_to_two_locks(sys), Inapplicable);
}

TEST_CASE("phantom padding keeps behaviour") {
    SatInstance si = gen_3sat({{1, 1, 1}}, false);
    CHECK(check_2lss(si.sys).two_lock);
    TwoLockView v = pad_to_two_locks(si.sys);
    for (std::size_t q = 0; q < v.sys.procs.size(); ++q) {
        CHECK(popcount(v.sys.procs[q].locks()) == 2);
        CHECK(v.pair[q][0] < v.pair[q][1]);
    }
    CHECK(enabled_moves(v.sys, initial_config(v.sys)) == enabled_moves(si.sys, initial_config(si.sys)));
}

TEST_CASE("nestedness with a witness") {
    NestedReport r = check_nested(test::fig1_system({"p"}));
    CHECK_FALSE(r.nested);
    CHECK(r.witness == std::vector<int>{0, 1, 2});
    CHECK(check_nested(philosophers(4)).nested);
    CHECK(check_nested(gen_indset({3, {{0, 1}, {1, 2}}}, 2).sys).nested);
}

TEST_CASE("step semantics") {
    System sys = test::fig1_system({"p", "q"});
    GlobalConfig c0 = initial_config(sys);
    auto c1 = step(sys, c0, {0, 0});
    REQUIRE(c1);
    CHECK(c1->state[0] == 1);
    CHECK(c1->held[0] == bit(0));
    Blocked why = Blocked::None;
    CHECK_FALSE(step(sys, *c1, {1, 0}, &why));
    CHECK(why == Blocked::HeldByOther);
    CHECK_FALSE(step(sys, c0, {0, 2}, &why));
    CHECK(why == Blocked::NoTransition);

    auto c2 = step(sys, *c1, {0, 1});
    REQUIRE(c2);
    CHECK(enabled_moves(sys, *c2) == std::vector<Move>{{0, 2}});
    CHECK(enabled_moves(philosophers(3), initial_config(philosophers(3))).size() == 3);
}

TEST_CASE("execute and project") {
    System sys = philosophers(2);
    CHECK(execute(sys, {}).front() == initial_config(sys));
    std::vector<Move> run{{0, 0}, {0, 1}, {1, 0}};
    CHECK_THROWS_AS(execute(sys, run), InputError);
    std::vector<Move> ok{{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 0}};
    auto trace = execute(sys, ok);
    CHECK(trace.size() == ok.size() + 1);
    CHECK(project(ok, 0) == std::vector<int>{0, 1, 2, 3});
    CHECK(project(ok, 1) == std::vector<int>{0});
}

TEST_CASE("random runs keep held sets disjoint and equal to owns") {
    for (int seed = 1; seed <= 40; ++seed) {
        RandomParams prm;
        prm.seed = seed;
        prm.processes = 3;
        prm.states = 5;
        prm.locks = 3;
        System sys = random_system(prm);
        SoundReport sr = check_sound(sys);
        REQUIRE(sr.sound);
        std::mt19937_64 rng(seed);
        GlobalConfig c = initial_config(sys);
        for (int i = 0; i < 50; ++i) {
            LockSet all = 0;
            for (std::size_t q = 0; q < sys.procs.size(); ++q) {
                CHECK((all & c.held[q]) == 0);
                all |= c.held[q];
                CHECK(c.held[q] == sr.owns[q][c.state[q]]);
            }
            auto moves = enabled_moves(sys, c);
            if (moves.empty()) break;
            Move m = moves[rng() % moves.size()];
            auto next = step(sys, c, m);
            REQUIRE(next);
            CHECK(*step(sys, c, m) == *next);
            c = *next;
        }
    }
}

TEST_CASE("local lassos") {
    System sys = test::fig1_system({"p"});
    const Process& p = sys.procs[0];
    CHECK_NOTHROW(validate_local_lasso(p, {{0, 1}, {2, 3, 4, 5}}));
    CHECK_THROWS_AS(validate_local_lasso(p, {{0, 1}, {2, 3}}), InputError);
    CHECK_THROWS_AS(execute_local(p, {1}), InputError);
}
