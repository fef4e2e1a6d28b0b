#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "limid/errors.hpp"
#include "limid/model.hpp"

namespace limid {

// ---------------------------------------------------------------------------
// Maze navigation
// ---------------------------------------------------------------------------

/// Grid for the maze problem. '.' is open, '#' is wall, '*' is the goal cell
/// (open). Rows are listed top to bottom; x grows to the right, y downward.
struct MazeGrid {
    int width = 0;
    int height = 0;
    std::vector<char> open;  // row-major, width*height
    int goal_x = -1, goal_y = -1;

    bool is_open(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height && open[y * width + x];
    }
    int open_count() const {
        int n = 0;
        for (char c : open) n += c;
        return n;
    }
};

inline MazeGrid parse_maze_grid(const std::string& text) {
    MazeGrid g;
    std::istringstream in(text);
    std::string row;
    std::vector<std::string> rows;
    while (std::getline(in, row)) {
        while (!row.empty() && (row.back() == '\r' || row.back() == ' ')) row.pop_back();
        if (!row.empty()) rows.push_back(row);
    }
    if (rows.empty()) throw InvalidModel("maze map is empty");
    g.height = static_cast<int>(rows.size());
    g.width = static_cast<int>(rows[0].size());
    g.open.assign(g.width * g.height, 0);
    for (int y = 0; y < g.height; ++y) {
        if (static_cast<int>(rows[y].size()) != g.width)
            throw InvalidModel("maze map rows differ in length");
        for (int x = 0; x < g.width; ++x) {
            char c = rows[y][x];
            if (c == '.' || c == '*') g.open[y * g.width + x] = 1;
            else if (c != '#')
                throw InvalidModel(std::string("bad maze map character '") + c + "'");
            if (c == '*') {
                if (g.goal_x >= 0) throw InvalidModel("maze map has more than one goal");
                g.goal_x = x;
                g.goal_y = y;
            }
        }
    }
    if (g.goal_x < 0) throw InvalidModel("maze map has no goal cell");
    if (g.open_count() == 0) throw InvalidModel("maze map has no open cells");
    return g;
}

/// Default 10-cell maze. Every open cell has a distinct wall signature, so the
/// four sensor readings pin down the current location exactly.
inline MazeGrid default_maze_grid() {
    return parse_maze_grid(
        "#.###\n"
        "#..##\n"
        "...##\n"
        ".#..*\n");
}

struct MazeSpec {
    MazeGrid grid = default_maze_grid();
    int stages = 2;
    double p_intended = 0.89;
    double p_stay = 0.089;
    double p_side = 0.01;
    double p_back = 0.001;
};

/// Maze actions: 0 = stay, 1..4 = move north, east, south, west.
inline Limid build_maze(const MazeSpec& spec) {
    if (spec.stages < 1) throw InvalidModel("maze needs at least one stage");
    const MazeGrid& g = spec.grid;
    const int W = g.width, H = g.height;
    static constexpr std::array<std::array<int, 2>, 4> kDir = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

    Limid l;
    l.name = "maze" + std::to_string(spec.stages);
    auto add = [&](const std::string& name, VarKind kind, int card) {
        Variable v;
        v.id = l.num_vars();
        v.name = name;
        v.kind = kind;
        v.cardinality = card;
        l.variables.push_back(v);
        l.parents.emplace_back();
        l.cpts.emplace_back();
        l.utils.emplace_back();
        return v.id;
    };

    // joint transition probability, normalized around blocked moves
    auto transition = [&](int x, int y, int a, int tx, int ty) -> double {
        if (!g.is_open(x, y)) return tx == x && ty == y ? 1.0 : 0.0;  // unreachable row
        if (a == 0) return tx == x && ty == y ? 1.0 : 0.0;
        int dir = a - 1;
        auto target = [&](int dd) { return std::array<int, 2>{x + kDir[dd][0], y + kDir[dd][1]}; };
        std::array<double, 5> p{};  // outcome weights: intended, stay, side1, side2, back
        p[0] = spec.p_intended;
        p[1] = spec.p_stay;
        p[2] = p[3] = spec.p_side;
        p[4] = spec.p_back;
        std::array<std::array<int, 2>, 5> cell{};
        cell[0] = target(dir);
        cell[1] = {x, y};
        cell[2] = target((dir + 1) % 4);
        cell[3] = target((dir + 3) % 4);
        cell[4] = target((dir + 2) % 4);
        double z = 0.0;
        for (int i = 0; i < 5; ++i) {
            if (!g.is_open(cell[i][0], cell[i][1])) p[i] = 0.0;
            z += p[i];
        }
        double out = 0.0;
        for (int i = 0; i < 5; ++i)
            if (cell[i][0] == tx && cell[i][1] == ty) out += p[i];
        return out / z;  // z >= p_stay since staying is always possible
    };

    std::vector<VarId> xs(spec.stages + 1), ys(spec.stages + 1), ds(spec.stages);
    std::vector<std::array<VarId, 4>> sensors(spec.stages);
    static const char* kSensorName[4] = {"ns", "es", "ss", "ws"};
    for (int i = 0; i < spec.stages; ++i) {
        for (int s = 0; s < 4; ++s)
            sensors[i][s] = add(std::string(kSensorName[s]) + std::to_string(i), VarKind::Chance, 2);
        ds[i] = add("d" + std::to_string(i), VarKind::Decision, 5);
    }
    for (int i = 0; i <= spec.stages; ++i) {
        xs[i] = add("x" + std::to_string(i), VarKind::Chance, W);
        ys[i] = add("y" + std::to_string(i), VarKind::Chance, H);
    }
    VarId u = add("u", VarKind::Utility, 0);

    // initial position: uniform over open cells, factored as P(x0) P(y0|x0)
    {
        std::vector<double> colcount(W, 0.0);
        for (int x = 0; x < W; ++x)
            for (int y = 0; y < H; ++y) colcount[x] += g.is_open(x, y);
        double n = g.open_count();
        for (int x = 0; x < W; ++x) l.cpts[xs[0]].push_back(colcount[x] / n);
        l.parents[ys[0]] = {xs[0]};
        for (int x = 0; x < W; ++x)
            for (int y = 0; y < H; ++y) {
                double p = colcount[x] > 0 ? (g.is_open(x, y) ? 1.0 / colcount[x] : 0.0)
                                           : 1.0 / H;
                l.cpts[ys[0]].push_back(p);
            }
    }
    for (int i = 0; i < spec.stages; ++i) {
        // sensors read adjacent walls; rows for wall cells are never reached
        for (int s = 0; s < 4; ++s) {
            VarId sv = sensors[i][s];
            l.parents[sv] = {xs[i], ys[i]};
            for (int x = 0; x < W; ++x)
                for (int y = 0; y < H; ++y) {
                    bool wall = !g.is_open(x + kDir[s][0], y + kDir[s][1]);
                    l.cpts[sv].push_back(wall ? 0.0 : 1.0);
                    l.cpts[sv].push_back(wall ? 1.0 : 0.0);
                }
        }
        // decision sees the current sensors and every previous decision
        for (int s = 0; s < 4; ++s) l.parents[ds[i]].push_back(sensors[i][s]);
        for (int j = 0; j < i; ++j) l.parents[ds[i]].push_back(ds[j]);
        // position transition, factored as P(x'|x,y,d) P(y'|x,y,d,x')
        l.parents[xs[i + 1]] = {xs[i], ys[i], ds[i]};
        l.parents[ys[i + 1]] = {xs[i], ys[i], ds[i], xs[i + 1]};
        for (int x = 0; x < W; ++x)
            for (int y = 0; y < H; ++y)
                for (int a = 0; a < 5; ++a) {
                    std::vector<double> colp(W, 0.0);
                    for (int tx = 0; tx < W; ++tx)
                        for (int ty = 0; ty < H; ++ty) colp[tx] += transition(x, y, a, tx, ty);
                    for (int tx = 0; tx < W; ++tx) l.cpts[xs[i + 1]].push_back(colp[tx]);
                    for (int tx = 0; tx < W; ++tx)
                        for (int ty = 0; ty < H; ++ty) {
                            double p = colp[tx] > 0.0
                                           ? transition(x, y, a, tx, ty) / colp[tx]
                                           : 1.0 / H;
                            l.cpts[ys[i + 1]].push_back(p);
                        }
                }
    }
    l.parents[u] = {xs[spec.stages], ys[spec.stages]};
    for (int x = 0; x < W; ++x)
        for (int y = 0; y < H; ++y)
            l.utils[u].push_back(x == g.goal_x && y == g.goal_y ? 1.0 : 0.0);
    return l;
}

// ---------------------------------------------------------------------------
// Multi-agent tiger
// ---------------------------------------------------------------------------

/// Tiger actions: 0 = listen, 1 = open left, 2 = open right.
/// Positions and observations: 0 = left, 1 = right.
struct TigerSpec {
    int horizon = 2;
    double listen_accuracy = 0.85;
    bool reset_on_open = true;
    /// reward[(a1*3 + a2)*2 + tiger]
    std::array<double, 18> rewards = default_rewards();

    static std::array<double, 18> default_rewards() {
        std::array<double, 18> r{};
        auto set = [&](int a1, int a2, int tiger, double v) { r[(a1 * 3 + a2) * 2 + tiger] = v; };
        for (int tiger = 0; tiger < 2; ++tiger) {
            int bad = tiger + 1;              // action that opens the tiger door
            int good = tiger == 0 ? 2 : 1;    // action that opens the treasure door
            set(0, 0, tiger, -2.0);
            set(bad, bad, tiger, -50.0);
            set(good, good, tiger, 20.0);
            set(bad, good, tiger, -100.0);
            set(good, bad, tiger, -100.0);
            set(0, bad, tiger, -101.0);
            set(bad, 0, tiger, -101.0);
            set(0, good, tiger, 9.0);
            set(good, 0, tiger, 9.0);
        }
        return r;
    }
};

inline Limid build_tiger(const TigerSpec& spec) {
    if (spec.horizon < 1) throw InvalidModel("tiger needs horizon >= 1");
    if (!(spec.listen_accuracy > 0.5 && spec.listen_accuracy <= 1.0))
        throw InvalidModel("listen accuracy must lie in (0.5, 1]");
    Limid l;
    l.name = "tiger" + std::to_string(spec.horizon);
    auto add = [&](const std::string& name, VarKind kind, int card) {
        Variable v;
        v.id = l.num_vars();
        v.name = name;
        v.kind = kind;
        v.cardinality = card;
        l.variables.push_back(v);
        l.parents.emplace_back();
        l.cpts.emplace_back();
        l.utils.emplace_back();
        return v.id;
    };
    int h = spec.horizon;
    std::vector<VarId> tiger(h), u(h);
    std::vector<std::array<VarId, 2>> obs(h), dec(h);
    for (int s = 0; s < h; ++s) {
        tiger[s] = add("tiger" + std::to_string(s + 1), VarKind::Chance, 2);
        for (int a = 0; a < 2; ++a)
            dec[s][a] = add("d" + std::to_string(a + 1) + "_" + std::to_string(s + 1),
                            VarKind::Decision, 3);
        for (int a = 0; a < 2; ++a)
            obs[s][a] = add("o" + std::to_string(a + 1) + "_" + std::to_string(s + 1),
                            VarKind::Chance, 2);
        u[s] = add("u" + std::to_string(s + 1), VarKind::Utility, 0);
    }
    for (int s = 0; s < h; ++s) {
        if (s == 0) {
            l.cpts[tiger[0]] = {0.5, 0.5};
        } else {
            l.parents[tiger[s]] = {tiger[s - 1], dec[s - 1][0], dec[s - 1][1]};
            for (int t = 0; t < 2; ++t)
                for (int a1 = 0; a1 < 3; ++a1)
                    for (int a2 = 0; a2 < 3; ++a2) {
                        bool opened = a1 != 0 || a2 != 0;
                        if (opened && spec.reset_on_open) {
                            l.cpts[tiger[s]].push_back(0.5);
                            l.cpts[tiger[s]].push_back(0.5);
                        } else {
                            l.cpts[tiger[s]].push_back(t == 0 ? 1.0 : 0.0);
                            l.cpts[tiger[s]].push_back(t == 0 ? 0.0 : 1.0);
                        }
                    }
        }
        for (int a = 0; a < 2; ++a) {
            // own history: d then o of every earlier stage, chronologically
            for (int t = 0; t < s; ++t) {
                l.parents[dec[s][a]].push_back(dec[t][a]);
                l.parents[dec[s][a]].push_back(obs[t][a]);
            }
            // hearing is informative only while listening
            l.parents[obs[s][a]] = {tiger[s], dec[s][a]};
            for (int t = 0; t < 2; ++t)
                for (int act = 0; act < 3; ++act) {
                    double p_left = act == 0 ? (t == 0 ? spec.listen_accuracy
                                                       : 1.0 - spec.listen_accuracy)
                                             : 0.5;
                    l.cpts[obs[s][a]].push_back(p_left);
                    l.cpts[obs[s][a]].push_back(1.0 - p_left);
                }
        }
        l.parents[u[s]] = {dec[s][0], dec[s][1], tiger[s]};
        l.utils[u[s]].assign(spec.rewards.begin(), spec.rewards.end());
    }
    return l;
}

// ---------------------------------------------------------------------------
// Random LIMIDs
// ---------------------------------------------------------------------------

struct RandomSpec {
    std::uint64_t seed = 1;
    int stages_min = 10, stages_max = 20;
    int chance_min = 3, chance_max = 6;   // chance nodes per stage
    int states_min = 2, states_max = 4;
    double util_min = -20.0, util_max = 20.0;
    int info_min = 2;        // lower bound on observed nodes per stage
    int cross_min = 2;       // lower bound on carried-over observations
    double couple_prob = 0.5;  // chance the stage utility sees the previous decision
    int intra_max_parents = 2;
};

namespace detail {

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    int irange(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    double uniform() { return (g() >> 11) * 0x1.0p-53; }
    template <class T>
    std::vector<T> sample(std::vector<T> pool, int k) {
        std::vector<T> out;
        for (int i = 0; i < k && !pool.empty(); ++i) {
            int j = irange(0, static_cast<int>(pool.size()) - 1);
            out.push_back(pool[j]);
            pool.erase(pool.begin() + j);
        }
        return out;
    }
};

}  // namespace detail

/// Staged random LIMID. Each stage holds a handful of chance nodes with
/// intra-stage structure, one decision observing roughly half of them (taking
/// childless nodes first), and one utility over the decision and two stage
/// nodes. Decisions carry over a random half of the previous stage's
/// observations, which keeps the no-recalling-forgotten-information rule
/// intact. When a stage utility also depends on the previous decision, that
/// decision is remembered as well.
inline Limid build_random(const RandomSpec& spec) {
    detail::Rng rng(spec.seed);
    Limid l;
    l.name = "random" + std::to_string(spec.seed);
    auto add = [&](const std::string& name, VarKind kind, int card) {
        Variable v;
        v.id = l.num_vars();
        v.name = name;
        v.kind = kind;
        v.cardinality = card;
        l.variables.push_back(v);
        l.parents.emplace_back();
        l.cpts.emplace_back();
        l.utils.emplace_back();
        return v.id;
    };
    int stages = rng.irange(spec.stages_min, spec.stages_max);
    std::vector<VarId> prev_info;
    VarId prev_dec = -1;
    for (int k = 1; k <= stages; ++k) {
        int n = rng.irange(spec.chance_min, spec.chance_max);
        std::vector<VarId> stage_vars;
        std::vector<int> intra_children(n, 0);
        for (int j = 0; j < n; ++j) {
            VarId c = add("c" + std::to_string(k) + "_" + std::to_string(j), VarKind::Chance,
                          rng.irange(spec.states_min, spec.states_max));
            if (j > 0) {
                int np = rng.irange(0, std::min(spec.intra_max_parents, j));
                for (VarId p : rng.sample(stage_vars, np)) {
                    l.parents[c].push_back(p);
                    intra_children[p - stage_vars.front()]++;
                }
            }
            std::sort(l.parents[c].begin(), l.parents[c].end());
            stage_vars.push_back(c);
        }
        for (VarId c : stage_vars) {
            std::size_t rows = l.parent_states(c);
            for (std::size_t r = 0; r < rows; ++r) {
                std::vector<double> row(l.card(c));
                double z = 0.0;
                for (double& x : row) {
                    x = 0.05 + rng.uniform();
                    z += x;
                }
                for (double x : row) l.cpts[c].push_back(x / z);
            }
        }
        // observed nodes: half, at least info_min, childless nodes first
        int want = std::clamp(std::max(spec.info_min, n / 2), 1, n);
        std::vector<VarId> by_children = stage_vars;
        std::stable_sort(by_children.begin(), by_children.end(), [&](VarId a, VarId b) {
            return intra_children[a - stage_vars.front()] < intra_children[b - stage_vars.front()];
        });
        std::vector<VarId> info(by_children.begin(), by_children.begin() + want);
        std::sort(info.begin(), info.end());

        bool couple = k > 1 && rng.uniform() < spec.couple_prob;
        VarId d = add("d" + std::to_string(k), VarKind::Decision,
                      rng.irange(spec.states_min, spec.states_max));
        if (!prev_info.empty()) {
            int carry = std::clamp(std::max(spec.cross_min,
                                            static_cast<int>(prev_info.size()) / 2),
                                   1, static_cast<int>(prev_info.size()));
            for (VarId p : rng.sample(prev_info, carry)) l.parents[d].push_back(p);
        }
        if (couple) l.parents[d].push_back(prev_dec);
        for (VarId p : info) l.parents[d].push_back(p);
        std::sort(l.parents[d].begin(), l.parents[d].end());

        VarId uv = add("u" + std::to_string(k), VarKind::Utility, 0);
        auto two = rng.sample(stage_vars, 2);
        std::set<VarId> uparents(two.begin(), two.end());
        uparents.insert(d);
        if (couple) uparents.insert(prev_dec);
        // orphaned stage nodes feed the utility so no node is barren
        auto ch = l.children();
        for (VarId c : stage_vars)
            if (ch[c].empty() && !uparents.count(c)) uparents.insert(c);
        l.parents[uv].assign(uparents.begin(), uparents.end());
        std::size_t rows = l.parent_states(uv);
        for (std::size_t r = 0; r < rows; ++r)
            l.utils[uv].push_back(spec.util_min + rng.uniform() * (spec.util_max - spec.util_min));

        prev_info = info;
        prev_dec = d;
    }
    return l;
}

}  // namespace limid
