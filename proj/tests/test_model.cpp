#include <catch2/catch_amalgamated.hpp>

#include "limid/io.hpp"
#include "limid/model.hpp"
#include "limid/problems.hpp"

using namespace limid;

namespace {

Limid chain_xdu() {
    // X -> D -> U with D observing X
    return parse_limid(
        "limid chain\n"
        "chance X 2\n"
        "decision D 2\n"
        "utility U\n"
        "parents D X\n"
        "parents U D\n"
        "cpt X 0.5 0.5\n"
        "util U 0 1\n");
}

}  // namespace

TEST_CASE("minimal valid chain has no violations") {
    Limid l = chain_xdu();
    CHECK(validate(l).empty());
}

TEST_CASE("cpt row sum violations are reported with row and value") {
    Limid l = chain_xdu();
    l.cpts[0] = {0.4, 0.5};
    auto v = validate(l);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::CptRowSum);
    CHECK(v[0].var == 0);
    CHECK(v[0].row == 0);
    CHECK(v[0].value == Catch::Approx(0.9));
}

TEST_CASE("cycles and utility children are reported") {
    Limid l = chain_xdu();
    l.parents[0] = {1};  // X <- D while D <- X
    l.cpts[0] = {0.5, 0.5, 0.5, 0.5};
    auto v = validate(l);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].kind == ViolationKind::Cycle);

    Limid m = chain_xdu();
    m.parents[1] = {0, 2};  // utility gains a child
    auto w = validate(m);
    bool found = false;
    for (auto& viol : w) found |= viol.kind == ViolationKind::UtilityHasChildren;
    CHECK(found);
}

TEST_CASE("no-recalling-forgotten-information violations are flagged") {
    Limid l = parse_limid(
        "limid norecall\n"
        "chance X 2\n"
        "decision D1 2\n"
        "decision D2 2\n"
        "decision D3 2\n"
        "utility U\n"
        "parents D1 X\n"
        "parents D2 D1\n"
        "parents D3 X D2\n"
        "parents U D3\n"
        "cpt X 0.5 0.5\n"
        "util U 0 1\n");
    auto v = validate(l);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::NoRecall);
    CHECK(l.var(v[0].var).name == "X");
    CHECK(l.var(v[0].var2).name == "D3");
}

TEST_CASE("partial order for the two-stage maze matches the block structure") {
    Limid l = build_maze({.stages = 2});
    PartialOrder po = partial_order(l);
    REQUIRE(po.decision_order.size() == 2);
    auto names = [&](const std::vector<VarId>& vs) {
        std::vector<std::string> out;
        for (VarId v : vs) out.push_back(l.var(v).name);
        return out;
    };
    CHECK(names(po.blocks[0]) == std::vector<std::string>{"ns0", "es0", "ss0", "ws0"});
    CHECK(names(po.blocks[1]) == std::vector<std::string>{"d0"});
    CHECK(names(po.blocks[2]) == std::vector<std::string>{"ns1", "es1", "ss1", "ws1"});
    CHECK(names(po.blocks[3]) == std::vector<std::string>{"d1"});
    CHECK(names(po.blocks[4]) ==
          std::vector<std::string>{"x0", "y0", "x1", "y1", "x2", "y2"});
}

TEST_CASE("zero-decision model yields a single block") {
    Limid l = parse_limid(
        "limid inference\n"
        "chance X 2\n"
        "cpt X 0.5 0.5\n");
    PartialOrder po = partial_order(l);
    REQUIRE(po.blocks.size() == 1);
    CHECK(po.blocks[0] == std::vector<VarId>{0});
}

TEST_CASE("cooperative pair is ordered by declaration index") {
    Limid l = parse_limid(
        "limid coop\n"
        "chance X 2\n"
        "decision D1 2\n"
        "decision D2 2\n"
        "utility U\n"
        "parents U D1 D2 X\n"
        "cpt X 0.5 0.5\n"
        "util U 1 2 3 4 5 6 7 8\n");
    PartialOrder po = partial_order(l);
    CHECK(po.decision_order == std::vector<VarId>{1, 2});
}

TEST_CASE("declared order contradicting a path is rejected") {
    Limid l = parse_limid(
        "limid bad\n"
        "decision D1 2\n"
        "chance X 2\n"
        "decision D2 2\n"
        "utility U\n"
        "parents X D1\n"
        "parents D2 X\n"
        "parents U D2\n"
        "cpt X 0.5 0.5 0.5 0.5\n"
        "util U 0 1\n"
        "order D2 D1\n");
    CHECK_THROWS_AS(partial_order(l), UnorderableDecisions);
}

TEST_CASE("partial order places every info variable before its decision") {
    Limid l = build_maze({.stages = 3});
    PartialOrder po = partial_order(l);
    std::vector<int> pos(l.num_vars(), -1);
    int t = 0;
    for (auto& b : po.blocks)
        for (VarId v : b) pos[v] = t++;
    for (VarId d : po.decision_order)
        for (VarId p : l.parents[d]) CHECK(pos[p] < pos[d]);
    // each chance/decision variable appears in exactly one block
    std::vector<int> count(l.num_vars(), 0);
    for (auto& b : po.blocks)
        for (VarId v : b) count[v]++;
    for (VarId v = 0; v < l.num_vars(); ++v)
        CHECK(count[v] == (l.is_utility(v) ? 0 : 1));
}
