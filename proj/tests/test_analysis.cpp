#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "limid/analysis.hpp"
#include "limid/io.hpp"
#include "limid/oracle.hpp"
#include "limid/problems.hpp"

using namespace limid;

namespace {

/// Brute-force d-separation: enumerate every undirected simple path and test
/// the blocking rules directly. Only for tiny graphs.
bool d_separated_bruteforce(const Limid& l, const VarSet& A, const VarSet& B, const VarSet& Z) {
    auto ch = l.children();
    int n = l.num_vars();
    auto is_parent = [&](VarId p, VarId c) {
        return std::count(l.parents[c].begin(), l.parents[c].end(), p) > 0;
    };
    std::vector<VarId> path;
    std::vector<char> used(n, 0);
    // interior blocking is validated as the path grows, so reaching B means
    // an active path exists
    std::function<bool(VarId)> active_path_to_b = [&](VarId v) -> bool {
        if (B.count(v)) return true;
        for (VarId w = 0; w < n; ++w) {
            if (used[w]) continue;
            if (!is_parent(v, w) && !is_parent(w, v)) continue;
            path.push_back(w);
            used[w] = 1;
            // validate the interior triple ending at w if it exists
            bool ok = true;
            if (path.size() >= 3) {
                VarId a = path[path.size() - 3], m = path[path.size() - 2], b = w;
                bool collider = is_parent(a, m) && is_parent(b, m);
                if (collider) {
                    bool anc_in_z = false;
                    VarSet dm = descendants(l, m);
                    dm.insert(m);
                    for (VarId d : dm) anc_in_z |= Z.count(d) > 0;
                    ok = anc_in_z;
                } else {
                    ok = !Z.count(m);
                }
            }
            if (ok && active_path_to_b(w)) return true;
            used[w] = 0;
            path.pop_back();
        }
        return false;
    };
    for (VarId a : A) {
        path = {a};
        std::fill(used.begin(), used.end(), 0);
        used[a] = 1;
        if (active_path_to_b(a)) return false;
    }
    return true;
}

Limid random_dag(std::mt19937_64& rng, int n) {
    Limid l;
    l.name = "dag";
    for (int i = 0; i < n; ++i) {
        Variable v;
        v.id = i;
        v.name = "v" + std::to_string(i);
        v.kind = VarKind::Chance;
        v.cardinality = 2;
        l.variables.push_back(v);
        l.parents.emplace_back();
        l.cpts.emplace_back();
        l.utils.emplace_back();
    }
    for (int c = 0; c < n; ++c)
        for (int p = 0; p < c; ++p)
            if (rng() % 100 < 30) l.parents[c].push_back(p);
    for (int c = 0; c < n; ++c) {
        std::size_t rows = l.parent_states(c);
        for (std::size_t r = 0; r < rows; ++r) {
            l.cpts[c].push_back(0.5);
            l.cpts[c].push_back(0.5);
        }
    }
    return l;
}

}  // namespace

TEST_CASE("chain and collider rules") {
    Limid l = parse_limid(
        "limid chain\n"
        "chance A 2\nchance B 2\nchance C 2\n"
        "parents B A\nparents C B\n"
        "cpt A 0.5 0.5\ncpt B 0.5 0.5 0.5 0.5\ncpt C 0.5 0.5 0.5 0.5\n");
    CHECK(d_separated(l, {0}, {2}, {1}));
    CHECK_FALSE(d_separated(l, {0}, {2}, {}));

    Limid coll = parse_limid(
        "limid coll\n"
        "chance A 2\nchance C 2\nchance B 2\n"
        "parents B A C\n"
        "cpt A 0.5 0.5\ncpt C 0.5 0.5\n"
        "cpt B 0.5 0.5 0.5 0.5 0.5 0.5 0.5 0.5\n");
    CHECK(d_separated(coll, {0}, {1}, {}));
    CHECK_FALSE(d_separated(coll, {0}, {1}, {2}));
}

TEST_CASE("d-separation agrees with path enumeration on random 8-node dags") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
        Limid l = random_dag(rng, 8);
        for (int q = 0; q < 25; ++q) {
            VarSet A, B, Z;
            for (VarId v = 0; v < 8; ++v) {
                switch (rng() % 4) {
                    case 0: A.insert(v); break;
                    case 1: B.insert(v); break;
                    case 2: Z.insert(v); break;
                    default: break;
                }
            }
            if (A.empty() || B.empty()) continue;
            CHECK(d_separated(l, A, B, Z) == d_separated_bruteforce(l, A, B, Z));
        }
    }
}

TEST_CASE("info var with no route to the decision's utilities is non-requisite") {
    Limid l = parse_limid(
        "limid nr\n"
        "chance I 2\n"
        "decision D 2\n"
        "utility U\n"
        "parents D I\n"
        "parents U D\n"
        "cpt I 0.5 0.5\n"
        "util U 0 1\n");
    auto removed = non_requisite_arcs(l);
    REQUIRE(removed.size() == 1);
    CHECK(removed[0] == std::make_pair(0, 1));
}

TEST_CASE("maze SIS and relaxed diagram match the coordinate picture") {
    Limid l = build_maze({.stages = 2});
    RelaxedId r = build_relaxed(l);
    auto name_set = [&](const std::vector<VarId>& vs) {
        std::set<std::string> out;
        for (VarId v : vs) out.insert(l.var(v).name);
        return out;
    };
    VarId d0 = l.find("d0").value(), d1 = l.find("d1").value();
    CHECK(name_set(r.sis.at(d0)) == std::set<std::string>{"x0", "y0"});
    CHECK(name_set(r.sis.at(d1)) == std::set<std::string>{"x1", "y1"});
    // every original information arc is gone: decisions observe coordinates only
    for (VarId p : l.parents[d1])
        CHECK_FALSE(std::count(r.limid.parents[d1].begin(), r.limid.parents[d1].end(), p));
    CHECK(validate(r.limid).empty());
    // removed arcs are reported against the original diagram
    CHECK(r.removed_arcs.size() == 4 + 5);  // 4 sensors for d0; 4 sensors + d0 for d1
}

TEST_CASE("SIS is empty when the only utility has no chance parents") {
    Limid l = parse_limid(
        "limid e\n"
        "chance I 2\n"
        "decision D 2\n"
        "utility U\n"
        "parents D I\n"
        "parents U D\n"
        "cpt I 0.5 0.5\n"
        "util U 0 1\n");
    CHECK(sufficient_information_set(l, 1).empty());
}

TEST_CASE("relaxation is sound: relaxed optimum dominates the original") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        RandomSpec spec;
        spec.seed = seed;
        spec.stages_min = 2;
        spec.stages_max = 3;
        spec.chance_min = spec.chance_max = 2;
        spec.states_min = spec.states_max = 2;
        spec.info_min = 1;
        spec.cross_min = 1;
        Limid l = build_random(spec);
        RelaxedId r = build_relaxed(l);
        REQUIRE(validate(r.limid).empty());
        OracleOptions cap;
        try {
            auto [s1, eu_orig] = brute_force_optimal(l, cap);
            auto [s2, eu_rel] = brute_force_optimal(r.limid, cap);
            CHECK(eu_rel >= eu_orig - 1e-9);
            ++checked;
        } catch (const TooLarge&) {
            continue;
        }
    }
    CHECK(checked >= 10);
}

TEST_CASE("deleting non-requisite arcs keeps the optimum unchanged") {
    for (std::uint64_t seed : {3ull, 7ull, 21ull}) {
        RandomSpec spec;
        spec.seed = seed;
        spec.stages_min = spec.stages_max = 2;
        spec.chance_min = spec.chance_max = 2;
        spec.states_min = spec.states_max = 2;
        spec.info_min = 1;
        spec.cross_min = 1;
        Limid l = build_random(spec);
        Limid reduced = l;
        for (auto [i, d] : non_requisite_arcs(l)) {
            auto& ps = reduced.parents[d];
            ps.erase(std::find(ps.begin(), ps.end(), i));
        }
        auto [s1, eu1] = brute_force_optimal(l);
        auto [s2, eu2] = brute_force_optimal(reduced);
        CHECK(eu2 == Catch::Approx(eu1).margin(1e-9));
    }
}

TEST_CASE("conditionally independent decision groups") {
    // shared root a observed by both decisions; observing it splits them
    Limid l = parse_limid(
        "limid cids\n"
        "chance a 2\n"
        "chance b 2\n"
        "chance c 2\n"
        "decision D1 2\n"
        "decision D2 2\n"
        "utility U1\n"
        "utility U2\n"
        "parents b a\n"
        "parents c a\n"
        "parents D1 b\n"
        "parents D2 c\n"
        "parents U1 D1 b\n"
        "parents U2 D2 c\n"
        "cpt a 0.5 0.5\n"
        "cpt b 0.8 0.2 0.3 0.7\n"
        "cpt c 0.6 0.4 0.1 0.9\n"
        "util U1 0 1 1 0\n"
        "util U2 0 2 2 0\n");
    VarId d1 = l.find("D1").value(), d2 = l.find("D2").value();
    auto before = detect_cids(l, {});
    REQUIRE(before.size() == 1);  // the unobserved root ties the groups
    auto after = detect_cids(l, {l.find("a").value()});
    REQUIRE(after.size() == 2);
    CHECK(after[0] == std::vector<VarId>{d1});
    CHECK(after[1] == std::vector<VarId>{d2});
    // the group closures really are d-separated given the observed prefix
    VarSet c1{d1, l.find("b").value(), l.find("U1").value()};
    VarSet c2{d2, l.find("c").value(), l.find("U2").value()};
    CHECK(d_separated(l, c1, c2, {l.find("a").value()}));
}

TEST_CASE("fully sequential maze never splits; disconnected diagrams always do") {
    Limid maze = build_maze({.stages = 2});
    CHECK(detect_cids(maze, {}).size() == 1);

    Limid two = parse_limid(
        "limid two\n"
        "chance X1 2\n"
        "decision D1 2\n"
        "utility U1\n"
        "chance X2 2\n"
        "decision D2 2\n"
        "utility U2\n"
        "parents D1 X1\n"
        "parents U1 D1 X1\n"
        "parents D2 X2\n"
        "parents U2 D2 X2\n"
        "cpt X1 0.5 0.5\n"
        "cpt X2 0.2 0.8\n"
        "util U1 0 1 1 0\n"
        "util U2 0 1 1 0\n");
    CHECK(detect_cids(two, {}).size() == 2);
}
