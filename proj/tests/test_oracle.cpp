#include <catch2/catch_amalgamated.hpp>

#include "limid/io.hpp"
#include "limid/oracle.hpp"
#include "limid/problems.hpp"

using namespace limid;

TEST_CASE("constant utility with no decisions") {
    Limid l = parse_limid(
        "limid c\n"
        "utility U\n"
        "util U 5\n");
    Strategy s;
    CHECK(strategy_eu(l, s) == Catch::Approx(5.0));
}

TEST_CASE("fair coin indexing a 0/1 utility") {
    Limid l = parse_limid(
        "limid coin\n"
        "chance X 2\n"
        "utility U\n"
        "parents U X\n"
        "cpt X 0.5 0.5\n"
        "util U 0 1\n");
    Strategy s;
    CHECK(strategy_eu(l, s) == Catch::Approx(0.5));
}

TEST_CASE("single binary decision with utilities 3 and 7") {
    Limid l = parse_limid(
        "limid d\n"
        "decision D 2\n"
        "utility U\n"
        "parents U D\n"
        "util U 3 7\n");
    auto [s, eu] = brute_force_optimal(l);
    CHECK(eu == Catch::Approx(7.0));
    CHECK(s.policies.at(0) == std::vector<int>{1});
}

TEST_CASE("strategy count law: 4 info states, 3 actions = 81") {
    Limid l = parse_limid(
        "limid cnt\n"
        "chance A 2\n"
        "chance B 2\n"
        "decision D 3\n"
        "utility U\n"
        "parents D A B\n"
        "parents U D\n"
        "cpt A 0.5 0.5\n"
        "cpt B 0.5 0.5\n"
        "util U 0 1 2\n");
    CHECK(strategy_count(l, 1000000) == 81);
}

TEST_CASE("caps raise TooLarge") {
    Limid l = parse_limid(
        "limid big\n"
        "chance A 4\n"
        "chance B 4\n"
        "decision D 4\n"
        "utility U\n"
        "parents D A B\n"
        "parents U D\n"
        "cpt A 0.25 0.25 0.25 0.25\n"
        "cpt B 0.25 0.25 0.25 0.25\n"
        "util U 0 1 2 3\n");
    OracleOptions opt;
    opt.strategy_cap = 10;
    CHECK_THROWS_AS(brute_force_optimal(l, opt), TooLarge);
    opt = {};
    opt.joint_cap = 3;
    Strategy s;
    s.policies[2] = std::vector<int>(16, 0);
    CHECK_THROWS_AS(strategy_eu(l, s, opt), TooLarge);
}

TEST_CASE("hand-expanded single-stage tiger summation") {
    // one stage, both agents act blindly; EU of (listen, listen) is -2,
    // and opening the same door pays 0.5*20 + 0.5*(-50) = -15
    Limid l = build_tiger({.horizon = 1});
    Strategy listen;
    listen.policies[l.find("d1_1").value()] = {0};
    listen.policies[l.find("d2_1").value()] = {0};
    CHECK(strategy_eu(l, listen) == Catch::Approx(-2.0));
    Strategy open_same;
    open_same.policies[l.find("d1_1").value()] = {1};
    open_same.policies[l.find("d2_1").value()] = {1};
    CHECK(strategy_eu(l, open_same) == Catch::Approx(0.5 * 20 + 0.5 * -50));
    auto [best, eu] = brute_force_optimal(l);
    CHECK(eu == Catch::Approx(-2.0));  // listening dominates at horizon one
}

TEST_CASE("brute force dominates random strategies and P_s sums to one") {
    RandomSpec spec;
    spec.seed = 11;
    spec.stages_min = spec.stages_max = 2;
    spec.chance_min = spec.chance_max = 2;
    spec.states_min = spec.states_max = 2;
    spec.info_min = 1;
    spec.cross_min = 1;
    Limid l = build_random(spec);
    REQUIRE(validate(l).empty());
    auto [best, best_eu] = brute_force_optimal(l);

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Strategy s;
        for (VarId d = 0; d < l.num_vars(); ++d)
            if (l.is_decision(d)) {
                auto& pol = s.policies[d];
                pol.resize(l.parent_states(d));
                for (auto& a : pol) a = static_cast<int>(rng() % l.card(d));
            }
        CHECK(strategy_eu(l, s) <= best_eu + 1e-9);
    }

    // P_s is a distribution: integrating all-ones utilities gives their count
    Limid ones = l;
    for (VarId v = 0; v < ones.num_vars(); ++v)
        if (ones.is_utility(v))
            for (auto& x : ones.utils[v]) x = 1.0;
    int n_utils = 0;
    for (VarId v = 0; v < ones.num_vars(); ++v) n_utils += ones.is_utility(v);
    CHECK(strategy_eu(ones, best) == Catch::Approx(static_cast<double>(n_utils)).margin(1e-9));
}
