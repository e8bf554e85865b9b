#include <doctest.h>

#include "lss/errors.hpp"
#include "lss/generators.hpp"
#include "lss/objective.hpp"
#include "support.hpp"

using namespace lss;

TEST_CASE("process deadlock automaton") {
    System sys = test::fig1_system({"p", "q"});
    Objective o = process_deadlock(sys, 0);
    CHECK_NOTHROW(o.validate(sys));
    const Dfa& d = o.automata[0];
    CHECK(d.total());
    // finite run: PAD forever ends in "done"
    CHECK(recurrent_states(d, {0}, {}) == std::vector<int>{d.find_state("done")});
    CHECK(recurrent_states(d, {0, 1}, {2, 3, 4, 5}) == std::vector<int>{d.find_state("live")});
    CHECK(o.automata[1].states.size() == 1);
}

TEST_CASE("pad cycle") {
    System sys = philosophers(2);
    Objective o = global_deadlock(sys);
    const Dfa& d = o.automata[0];
    CHECK(pad_cycle(d, d.initial) == std::vector<int>{d.find_state("done")});
}

TEST_CASE("formula text round trip") {
    System sys = test::fig1_system({"p", "q"});
    Objective o = conjoin(process_deadlock(sys, 0), complement(process_deadlock(sys, 1)));
    std::string text = format_formula(o.phi, sys, o);
    Formula back = parse_formula(text, sys, o);
    CHECK(format_formula(back, sys, o) == text);
    for (unsigned v = 0; v < 16; ++v) {
        auto val = [&](int a) { return ((v >> (atom_proc(a) * 2 + (atom_state(a) & 1))) & 1U) != 0; };
        CHECK(eval(back, val) == eval(o.phi, val));
    }
    CHECK_THROWS_AS(parse_formula("inf(zz,live)", sys, o), InputError);
    CHECK_THROWS_AS(parse_formula("inf(p,live", sys, o), InputError);
}

TEST_CASE("conjunction and complement") {
    System sys = philosophers(2);
    Objective a = process_deadlock(sys, 0), b = complement(process_deadlock(sys, 1));
    Objective c = conjoin(a, b);
    CHECK_NOTHROW(c.validate(sys));
    CHECK(c.automata[0].states.size() == 2);
    // evaluate both sides on a run where p1 stops and p2 loops
    auto holds = [&](const Objective& o, const std::vector<std::vector<int>>& stems,
                     const std::vector<std::vector<int>>& loops) {
        std::vector<int> inf;
        for (std::size_t q = 0; q < 2; ++q)
            for (int s : recurrent_states(o.automata[q], stems[q], loops[q]))
                inf.push_back(inf_atom(static_cast<int>(q), s));
        return eval(o.phi, [&](int x) { return std::find(inf.begin(), inf.end(), x) != inf.end(); });
    };
    std::vector<std::vector<int>> stems{{}, {}}, loops{{}, {0, 1, 2, 3}};
    CHECK(holds(a, stems, loops));
    CHECK(holds(b, stems, loops));
    CHECK(holds(c, stems, loops));
    loops = {{0, 1, 2, 3}, {0, 1, 2, 3}};
    CHECK_FALSE(holds(c, stems, loops));
}

TEST_CASE("local reach forever") {
    System sys = test::fig1_system({"p"});
    Objective o = local_reach_forever(sys, 0, {3});
    CHECK_THROWS_AS(local_reach_forever(sys, 0, {9}), InputError);
    CHECK_THROWS_AS(process_deadlock(sys, 4), InputError);
    const Dfa& d = o.automata[0];
    auto inf = recurrent_states(d, {0, 1}, {2, 3, 4, 5});
    CHECK(std::find(inf.begin(), inf.end(), 3) != inf.end());
}

TEST_CASE("validation") {
    System sys = philosophers(2);
    Objective o = universal(sys);
    o.automata.pop_back();
    CHECK_THROWS_AS(o.validate(sys), InputError);
    Objective dangling = universal(sys);
    dangling.phi = Formula::var(inf_atom(0, 7));
    CHECK_THROWS_AS(dangling.validate(sys), InputError);
}
