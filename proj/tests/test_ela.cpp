#include <doctest.h>

#include <map>
#include <random>

#include "lss/ela.hpp"
#include "lss/errors.hpp"
#include "lss/formula.hpp"
#include "support.hpp"

using namespace lss;

TEST_CASE("formula evaluation") {
    Formula f = Formula::var(0);
    CHECK(eval(f, std::map<int, bool>{{0, true}}));
    Formula g = !Formula::var(0) && Formula::var(1);
    CHECK_FALSE(eval(g, std::map<int, bool>{{0, true}, {1, true}}));
    CHECK_THROWS_AS(eval(g, std::map<int, bool>{{0, false}}), InputError);
    CHECK(eval(Formula::truth(), [](int) { return false; }));
    CHECK_FALSE(eval(Formula::falsity(), [](int) { return true; }));
}

TEST_CASE("dnf agrees with the formula on every valuation") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        Ela a = test::random_ela(rng, 6, 1);
        const Formula& f = a.acceptance;
        Dnf d = to_dnf(f);
        for (unsigned v = 0; v < 64; ++v) {
            auto val = [&](int x) { return ((v >> x) & 1U) != 0; };
            bool any = false;
            for (const Literals& c : d) any = any || eval(c, val);
            CHECK(any == eval(f, val));
        }
    }
}

TEST_CASE("dnf bound") {
    std::vector<Formula> clauses;
    for (int i = 0; i < 14; ++i) clauses.push_back(Formula::var(2 * i) || Formula::var(2 * i + 1));
    CHECK_THROWS_AS(to_dnf(Formula::conj(clauses), 4096), DnfBlowup);
}

namespace {

/// a^omega with inf on state 1, reached by an epsilon edge.
Ela eps_example() {
    Ela a;
    a.letters = {"a", "b"};
    int s0 = a.add_state("s0"), s1 = a.add_state("s1"), s2 = a.add_state("s2");
    a.add_eps(s0, s1);
    a.add_edge(s1, 0, s1);
    a.add_edge(s0, 1, s2);
    a.add_edge(s2, 1, s2);
    a.acceptance = Formula::var(s1);
    return a;
}

}  // namespace

TEST_CASE("epsilon elimination keeps the language") {
    Ela a = eps_example();
    CHECK(a.has_eps());
    Ela b = eliminate_epsilon(a);
    CHECK_FALSE(b.has_eps());
    CHECK(accepts(b, {}, {0}));
    CHECK_FALSE(accepts(b, {}, {1}));
    CHECK_FALSE(accepts(b, {1}, {0}));
}

TEST_CASE("accepting lasso") {
    Ela a;
    a.letters = {"x"};
    int s = a.add_state("s"), t = a.add_state("t");
    a.add_edge(s, 0, t);
    a.add_edge(t, 0, t);
    a.acceptance = Formula::var(t);
    auto l = find_accepting_lasso(a);
    REQUIRE(l);
    CHECK(test::ela_lasso_replays(a, *l));
    CHECK(loop_state_set(*l) == std::vector<int>{t});

    a.acceptance = Formula::var(s);
    CHECK_FALSE(find_accepting_lasso(a));
    a.acceptance = !Formula::var(t);
    CHECK_FALSE(find_accepting_lasso(a));
}

TEST_CASE("product is the intersection") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        Ela x = test::random_ela(rng, 4, 2), y = test::random_ela(rng, 4, 2);
        Ela p = product({&x, &y});
        for (int w = 0; w < 16; ++w) {
            std::vector<int> stem{w & 1}, loop{(w >> 1) & 1, (w >> 2) & 1, (w >> 3) & 1};
            CHECK(accepts(p, stem, loop) == (accepts(x, stem, loop) && accepts(y, stem, loop)));
        }
    }
}

TEST_CASE("restriction drops states") {
    Ela a = eliminate_epsilon(eps_example());
    Ela r = restrict_to(a, {1, 0, 1});
    CHECK_FALSE(find_accepting_lasso(r));
    Ela none = restrict_to(a, {0, 1, 1});
    CHECK_FALSE(find_accepting_lasso(none));
}

TEST_CASE("emptiness equals enumeration on random automata") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 500; ++i) {
        Ela a = test::random_ela(rng, 5, 2);
        auto l = find_accepting_lasso(a);
        CHECK(l.has_value() == test::ela_nonempty_by_enumeration(a));
        if (l) CHECK(test::ela_lasso_replays(a, *l));
    }
}
