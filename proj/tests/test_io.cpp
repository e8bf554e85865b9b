#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lss/errors.hpp"
#include "lss/generators.hpp"
#include "lss/io.hpp"
#include "support.hpp"

#ifndef LSS_TEST_DATA
#define LSS_TEST_DATA "tests/data"
#endif

using namespace lss;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string data(const std::string& name) { return slurp(std::filesystem::path(LSS_TEST_DATA) / name); }

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string error_of(const std::string& text) {
    try {
        parse_system(text);
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("example file parses and classifies") {
    System sys = parse_system(data("fig1.json"));
    REQUIRE(sys.procs.size() == 1);
    CHECK(check_sound(sys).sound);
    CHECK(check_exclusive(sys).exclusive);
    CHECK(check_2lss(sys).two_lock);
    CHECK_FALSE(check_nested(sys).nested);
}

TEST_CASE("round trip on the bundled systems") {
    for (const char* f : {"fig1.json", "two_fig1.json", "philo3.json", "philo3_left.json"}) {
        System a = parse_system(data(f));
        std::string once = serialize_system(a);
        CHECK(serialize_system(parse_system(once)) == once);
    }
    for (bool ex : {false, true}) {
        SatInstance si = gen_3sat({{1, 2, -3}, {-1, -1, 2}}, ex);
        std::string text = serialize_system(si.sys);
        System back = parse_system(text);
        CHECK(serialize_system(back) == text);
        // action indices may be renumbered by the system round trip, so
        // compare from the reparsed system on
        std::string raw = serialize_objective(si.objective, si.sys);
        std::string obj = serialize_objective(parse_objective(raw, back).objective, back);
        CHECK(serialize_objective(parse_objective(obj, back).objective, back) == obj);
    }
}

TEST_CASE("parse errors carry the JSON path") {
    std::string bad = R"js({"locks":["t"],"processes":[{"name":"p","states":["a","b"],"initial":"a",
        "transitions":[{"from":"a","action":"g","op":{"kind":"get","lock":"x"},"to":"b"}]}]})js";
    std::string e = error_of(bad);
    CHECK(e.find("processes[0].transitions[0].op.lock") != std::string::npos);
    CHECK(e.find("undeclared lock 'x'") != std::string::npos);

    std::string dup = R"js({"locks":["t"],"processes":[{"name":"p","states":["a","b"],"initial":"a",
        "transitions":[{"from":"a","action":"g","op":{"kind":"get","lock":"t"},"to":"b"},
                       {"from":"b","action":"g","op":{"kind":"rel","lock":"t"},"to":"a"}]}]})js";
    CHECK(error_of(dup).find("two different operations") != std::string::npos);

    std::string foreign = R"js({"locks":[],"processes":[{"name":"p","states":["a"],"initial":"a"},
        {"name":"q","states":["a"],"initial":"a",
         "transitions":[{"from":"a","action":"p.n","op":{"kind":"nop"},"to":"a"}]}]})js";
    CHECK(error_of(foreign).find("belongs to process p") != std::string::npos);

    std::string qualified = R"js({"locks":[],"processes":[{"name":"p","states":["a"],"initial":"a",
         "transitions":[{"from":"a","action":"p.n","op":{"kind":"nop"},"to":"a"}]}]})js";
    CHECK(parse_system(qualified).procs[0].actions[0] == "n");

    CHECK(error_of("{").find("invalid JSON") != std::string::npos);
    CHECK(error_of(R"js({"locks":[]})js").find("missing key 'processes'") != std::string::npos);
}

TEST_CASE("objective files") {
    System sys = parse_system(data("two_fig1.json"));
    ObjectiveFile gd = parse_objective(data("global_deadlock.json"), sys);
    CHECK(gd.builtin == "global-deadlock");
    ObjectiveFile live = parse_objective(data("some_process_live.json"), sys);
    CHECK(live.negated);

    std::string explicit_obj = R"js({"automata":{"p":{"states":["x","y"],"initial":"x",
        "transitions":[{"from":"x","letter":"get_t1","to":"y"},{"from":"y","letter":"#pad","to":"y"}]}},
        "formula":"inf(p,y)"})js";
    Objective o = parse_objective(explicit_obj, sys).objective;
    CHECK(o.automata[0].total());
    CHECK(o.automata[0].find_state(kSink) >= 0);
    CHECK(o.automata[1].states.size() == 1);

    std::string bad = R"js({"automata":{"p":{"states":["x"],"initial":"x",
        "transitions":[{"from":"x","letter":"nope","to":"x"}]}}})js";
    try {
        parse_objective(bad, sys);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("automata.p.transitions[0].letter") != std::string::npos);
    }
}

TEST_CASE("witness round trip and replay") {
    System sys = test::fig1_system({"p", "q"});
    Objective gd = global_deadlock(sys);
    OracleResult r = explore_verify(sys, gd);
    Witness w = witness_of(r);
    std::string text = serialize_witness(w, sys);
    Witness back = parse_witness(text, sys);
    CHECK(serialize_witness(back, sys) == text);
    CHECK(replay_witness(sys, &gd, back).empty());

    Verdict2 v = verify_2lss(sys, gd);
    Witness c = witness_of(*v.certificate, sys);
    std::string ct = serialize_witness(c, sys);
    CHECK(serialize_witness(parse_witness(ct, sys), sys) == ct);
    CHECK(replay_witness(sys, &gd, parse_witness(ct, sys)).empty());
    Objective live = complement(gd);
    CHECK_FALSE(replay_witness(sys, &live, c).empty());

    System philo = philosophers(3);
    Witness circ = witness_of(*detect_circular_deadlock(philo));
    std::string cj = serialize_witness(circ, philo);
    CHECK(replay_witness(philo, nullptr, parse_witness(cj, philo)).empty());
}

TEST_CASE("dimacs and graphs") {
    Cnf c = parse_dimacs("c x\np cnf 2 2\n1 -2 2 0\n-1 -1 -1 0\n");
    CHECK(c.size() == 2);
    CHECK(parse_dimacs(serialize_dimacs(c)) == c);
    CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), InputError);
    CHECK_THROWS_AS(parse_dimacs("1 2 3\n"), InputError);
    CHECK_THROWS_AS(parse_dimacs(""), InputError);
    UGraph g = parse_graph(R"js({"vertices":3,"edges":[[1,2],[3,2]]})js");
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK_THROWS_AS(parse_graph(R"js({"vertices":2,"edges":[[1,1]]})js"), InputError);
    CHECK_THROWS_AS(parse_graph(R"js({"vertices":2,"edges":[[1,3]]})js"), InputError);
}

TEST_CASE("dot export") {
    System one = test::fig1_system({"p"});
    std::string d = dot_process(one.procs[0], one);
    CHECK(count(d, " -> ") == 6);
    CHECK(count(d, "[label=") == 12);
    System two = test::fig1_system({"p", "q"});
    std::string g = dot_lock_graph(build_lock_graph(two), two);
    CHECK(count(g, " -> ") == 4);
    CHECK(count(g, "\"t1\";") + count(g, "\"t2\";") == 2);
    CHECK(dot_system(System{}) == "digraph lss {\n}\n");
    std::string e = dot_ela(build_pattern_ela(one.procs[0], all_patterns({0, 1})[0]));
    CHECK(count(e, "shape=doublecircle") == 1);
    std::string inf = dot_inf_graph(one, {pattern_of_local_lasso(one.procs[0], {{0, 1}, {2, 3, 4, 5}})});
    CHECK(count(inf, " -> ") == 1);
    Objective o = process_deadlock(one, 0);
    CHECK(dot_dfa(o.automata[0], one.procs[0]).find("#pad") != std::string::npos);
}

TEST_CASE("3SAT gadget") {
    SatInstance yes = gen_3sat({{1, 1, 1}}, false);
    CHECK(check_sound(yes.sys).sound);
    CHECK(check_2lss(yes.sys).two_lock);
    CHECK_FALSE(check_exclusive(yes.sys).exclusive);
    CHECK(verify_2lss(yes.sys, yes.objective).yes);
    SatInstance no = gen_3sat({{1, 1, 1}, {-1, -1, -1}}, false);
    CHECK_FALSE(verify_2lss(no.sys, no.objective).yes);
    SatInstance ex = gen_3sat({{1, 1, 1}, {-1, -1, -1}}, true);
    CHECK(check_exclusive(ex.sys).exclusive);
    CHECK_FALSE(verify_2lss(ex.sys, ex.objective).yes);
    CHECK(verify_2lss(gen_3sat({{1, -2, 2}}, true).sys, gen_3sat({{1, -2, 2}}, true).objective).yes);
    CHECK_THROWS_AS(gen_3sat({}, false), InputError);
    CHECK_THROWS_AS(gen_3sat({{0, 1, 1}}, false), InputError);
}

TEST_CASE("independent-set gadget") {
    UGraph p3{3, {{0, 1}, {1, 2}}};
    UGraph k3{3, {{0, 1}, {0, 2}, {1, 2}}};
    IndsetInstance a = gen_indset(p3, 2);
    CHECK(a.k == 2);
    CHECK(check_sound(a.sys).sound);
    CHECK(check_nested(a.sys).nested);
    CHECK(check_exclusive(a.sys).exclusive);
    CHECK(detect_circular_deadlock(a.sys));
    CHECK_FALSE(detect_circular_deadlock(gen_indset(k3, 2).sys));
    for (const UGraph& g : test::graphs_up_to_iso(6, 3)) {
        IndsetInstance in = gen_indset(g, 3);
        for (const Process& p : in.sys.procs) {
            int most = 0;
            SoundReport sr = check_sound(in.sys);
            for (std::size_t s = 0; s < p.states.size(); ++s)
                most = std::max(most, popcount(sr.owns[&p - in.sys.procs.data()][s]));
            CHECK(most <= 5);
        }
    }
    CHECK_THROWS_AS(gen_indset(p3, 0), InputError);
    CHECK_THROWS_AS(gen_indset(p3, 4), InputError);
}

TEST_CASE("family generators") {
    System philo = philosophers(3);
    CHECK(check_sound(philo).sound);
    CHECK(check_exclusive(philo).exclusive);
    CHECK(check_nested(philo).nested);
    CHECK(check_2lss(philo).two_lock);
    CHECK_THROWS_AS(philosophers(1), InputError);
    CHECK_THROWS_AS(philosophers(3, {4}), InputError);
    for (int seed = 1; seed <= 50; ++seed) {
        RandomParams r;
        r.seed = seed;
        r.processes = 3;
        r.states = 5;
        r.locks = 4;
        r.exclusive = seed % 2 == 0;
        r.two_lock = seed % 3 == 0;
        r.nested = seed % 5 == 0;
        System s = random_system(r);
        CHECK(check_sound(s).sound);
        if (r.exclusive) CHECK(check_exclusive(s).exclusive);
        if (r.two_lock) CHECK(check_2lss(s).two_lock);
        if (r.nested) CHECK(check_nested(s).nested);
        CHECK(serialize_system(random_system(r)) == serialize_system(s));
    }
}
