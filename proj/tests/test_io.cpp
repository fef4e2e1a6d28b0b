#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "limid/io.hpp"
#include "limid/jsonio.hpp"
#include "limid/problems.hpp"

using namespace limid;

namespace {
std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("minimal file with a uniform chance variable") {
    Limid l = parse_limid("limid one\nchance X 3\ncpt X 0.25 0.25 0.5\n");
    REQUIRE(l.num_vars() == 1);
    CHECK(l.var(0).name == "X");
    CHECK(l.card(0) == 3);
    CHECK(l.cpts[0] == std::vector<double>{0.25, 0.25, 0.5});
}

TEST_CASE("serialize is a fixpoint on canonical golden files") {
    for (const char* name : {"chain.limid", "weather.limid"}) {
        std::string text = slurp(std::string(LIMID_TEST_DATA_DIR) + "/" + name);
        Limid l = parse_limid(text);
        CHECK(serialize_limid(l) == text);
    }
}

TEST_CASE("parse-serialize round trip preserves structure and values exactly") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        RandomSpec spec;
        spec.seed = seed;
        spec.stages_min = spec.stages_max = 3;
        Limid l = build_random(spec);
        std::string s1 = serialize_limid(l);
        Limid back = parse_limid(s1);
        REQUIRE(back.num_vars() == l.num_vars());
        for (VarId v = 0; v < l.num_vars(); ++v) {
            CHECK(back.var(v).name == l.var(v).name);
            CHECK(back.var(v).kind == l.var(v).kind);
            CHECK(back.var(v).cardinality == l.var(v).cardinality);
            CHECK(back.parents[v] == l.parents[v]);
            CHECK(back.cpts[v] == l.cpts[v]);   // exact doubles
            CHECK(back.utils[v] == l.utils[v]);
        }
        CHECK(serialize_limid(back) == s1);
    }
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse_limid("limid t\nchance X 2\ncpt X zero 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_limid("chance X 2\n"), ParseError);
    CHECK_THROWS_AS(parse_limid("limid t\nbogus X\n"), ParseError);
}

TEST_CASE("semantic errors: undeclared names and wrong table lengths") {
    CHECK_THROWS_AS(parse_limid("limid t\nchance X 2\nparents X Y\ncpt X 0.5 0.5\n"),
                    SemanticError);
    // 3 values for a binary variable with no parents
    CHECK_THROWS_AS(parse_limid("limid t\nchance X 2\ncpt X 0.2 0.3 0.5\n"), SemanticError);
    CHECK_THROWS_AS(parse_limid("limid t\nchance X 2\n"), SemanticError);  // missing cpt
    CHECK_THROWS_AS(parse_limid("limid t\nutility U\nutil U 1 2\n"), SemanticError);
}

TEST_CASE("comments and blank lines are ignored") {
    Limid l = parse_limid(
        "limid c  # header\n"
        "\n"
        "# a chance variable\n"
        "chance X 2   # two states\n"
        "cpt X 0.5 0.5\n");
    CHECK(l.num_vars() == 1);
}

TEST_CASE("explicit order directive round-trips") {
    std::string text =
        "limid o\n"
        "decision D1 2\n"
        "decision D2 2\n"
        "utility U\n"
        "parents U D1 D2\n"
        "util U 0 1 2 3\n"
        "order D2 D1\n";
    Limid l = parse_limid(text);
    CHECK(l.declared_order == std::vector<VarId>{1, 0});
    CHECK(serialize_limid(l) == text);
}

TEST_CASE("strategy json round trip") {
    Limid l = parse_limid(
        "limid s\n"
        "chance X 2\n"
        "decision D 3\n"
        "utility U\n"
        "parents D X\n"
        "parents U D\n"
        "cpt X 0.5 0.5\n"
        "util U 0 1 2\n");
    Strategy s;
    s.policies[1] = {2, 0};
    s.expected_utility = 1.0;
    json j = strategy_to_json(l, s);
    CHECK(j["decisions"][0]["name"] == "D");
    CHECK(j["decisions"][0]["info_vars"] == json::array({"X"}));
    Strategy back = strategy_from_json(l, j);
    CHECK(back.policies == s.policies);

    json bad = j;
    bad["decisions"][0]["policy"] = {5, 0};
    CHECK_THROWS_AS(strategy_from_json(l, bad), SemanticError);
}
