#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "limid/errors.hpp"
#include "limid/table.hpp"

namespace limid {

enum class VarKind { Chance, Decision, Utility };

struct Variable {
    VarId id = -1;
    std::string name;
    VarKind kind = VarKind::Chance;
    int cardinality = 0;  // 0 for utility variables
};

/// A limited-memory influence diagram. Immutable after construction; treat as
/// a value. Tables follow the Table layout convention: CPT scope is
/// (parents..., child), utility scope is (parents...).
struct Limid {
    std::string name;
    std::vector<Variable> variables;
    std::vector<std::vector<VarId>> parents;  // per variable id
    std::vector<std::vector<double>> cpts;    // per variable id; chance only
    std::vector<std::vector<double>> utils;   // per variable id; utility only
    std::vector<VarId> declared_order;        // explicit decision order, may be empty

    int num_vars() const { return static_cast<int>(variables.size()); }
    const Variable& var(VarId v) const { return variables[v]; }
    int card(VarId v) const { return variables[v].cardinality; }
    bool is_chance(VarId v) const { return variables[v].kind == VarKind::Chance; }
    bool is_decision(VarId v) const { return variables[v].kind == VarKind::Decision; }
    bool is_utility(VarId v) const { return variables[v].kind == VarKind::Utility; }

    std::vector<VarId> vars_of_kind(VarKind k) const {
        std::vector<VarId> out;
        for (const auto& v : variables)
            if (v.kind == k) out.push_back(v.id);
        return out;
    }

    std::optional<VarId> find(const std::string& name_) const {
        for (const auto& v : variables)
            if (v.name == name_) return v.id;
        return std::nullopt;
    }

    std::vector<std::vector<VarId>> children() const {
        std::vector<std::vector<VarId>> ch(variables.size());
        for (VarId v = 0; v < num_vars(); ++v)
            for (VarId p : parents[v]) ch[p].push_back(v);
        return ch;
    }

    std::size_t parent_states(VarId v) const {
        std::size_t n = 1;
        for (VarId p : parents[v]) n *= static_cast<std::size_t>(card(p));
        return n;
    }

    std::size_t cpt_len(VarId v) const { return parent_states(v) * card(v); }

    Table cpt_table(VarId v) const {
        std::vector<VarId> scope = parents[v];
        scope.push_back(v);
        std::vector<int> cards;
        for (VarId s : scope) cards.push_back(card(s));
        Table t(scope, cards);
        t.data = cpts[v];
        return t;
    }

    Table util_table(VarId u) const {
        std::vector<int> cards;
        for (VarId s : parents[u]) cards.push_back(card(s));
        Table t(parents[u], cards);
        t.data = utils[u];
        return t;
    }

    /// Row-major index of a parent instantiation (last parent varies fastest).
    std::size_t parent_index(VarId v, const std::vector<int>& state) const {
        std::size_t idx = 0;
        for (VarId p : parents[v]) idx = idx * card(p) + state[p];
        return idx;
    }
};

/// One policy table per decision: action index per information-state index,
/// information states in the same row-major order as parent instantiations.
struct Strategy {
    std::map<VarId, std::vector<int>> policies;
    double expected_utility = std::numeric_limits<double>::quiet_NaN();
};

enum class ViolationKind {
    Cycle,
    UtilityHasChildren,
    CptRowSum,
    WrongTableLength,
    NegativeProbability,
    BadCardinality,
    NoRecall,
    DuplicateName,
};

struct Violation {
    ViolationKind kind;
    VarId var = -1;   // primary variable involved
    VarId var2 = -1;  // e.g. the later decision for NoRecall
    long row = -1;    // CPT row for CptRowSum
    double value = 0.0;
    std::string message;
};

namespace detail {

inline bool topological_order(const Limid& l, std::vector<VarId>& order) {
    int n = l.num_vars();
    std::vector<int> indeg(n, 0);
    auto ch = l.children();
    for (VarId v = 0; v < n; ++v) indeg[v] = static_cast<int>(l.parents[v].size());
    std::vector<VarId> queue;
    for (VarId v = 0; v < n; ++v)
        if (indeg[v] == 0) queue.push_back(v);
    order.clear();
    // lowest id first keeps the order deterministic
    std::make_heap(queue.begin(), queue.end(), std::greater<>());
    while (!queue.empty()) {
        std::pop_heap(queue.begin(), queue.end(), std::greater<>());
        VarId v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (VarId c : ch[v])
            if (--indeg[c] == 0) {
                queue.push_back(c);
                std::push_heap(queue.begin(), queue.end(), std::greater<>());
            }
    }
    return static_cast<int>(order.size()) == n;
}

/// reach[u] = set of vars reachable from u by directed paths (u excluded).
inline std::vector<std::set<VarId>> reachability(const Limid& l) {
    int n = l.num_vars();
    auto ch = l.children();
    std::vector<VarId> topo;
    topological_order(l, topo);
    std::vector<std::set<VarId>> reach(n);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        VarId v = *it;
        for (VarId c : ch[v]) {
            reach[v].insert(c);
            reach[v].insert(reach[c].begin(), reach[c].end());
        }
    }
    return reach;
}

}  // namespace detail

/// Blocks I_0 < D_1 < I_1 < ... < D_n < I_n. Even positions hold chance
/// variable sets, odd positions hold a single decision each. I_k (k < n) are
/// the information variables of D_{k+1} not placed earlier; I_n is every
/// remaining chance variable.
struct PartialOrder {
    std::vector<std::vector<VarId>> blocks;
    std::vector<VarId> decision_order;
    std::vector<int> block_of;  // -1 for utilities

    int num_decisions() const { return static_cast<int>(decision_order.size()); }
};

/// Derive a total decision order: directed paths between decisions constrain
/// the order; incomparable pairs fall back to declaration (id) order. An
/// explicit declared order wins but must not contradict a directed path.
inline std::vector<VarId> derive_decision_order(const Limid& l) {
    std::vector<VarId> decisions = l.vars_of_kind(VarKind::Decision);
    auto reach = detail::reachability(l);
    if (!l.declared_order.empty()) {
        if (l.declared_order.size() != decisions.size())
            throw UnorderableDecisions("declared order must list every decision exactly once");
        std::vector<int> pos(l.num_vars(), -1);
        for (std::size_t i = 0; i < l.declared_order.size(); ++i)
            pos[l.declared_order[i]] = static_cast<int>(i);
        for (VarId d : decisions)
            if (pos[d] < 0)
                throw UnorderableDecisions("declared order must list every decision exactly once");
        for (VarId a : decisions)
            for (VarId b : decisions)
                if (a != b && reach[a].count(b) && pos[a] > pos[b])
                    throw UnorderableDecisions(
                        "declared order contradicts the directed path " + l.var(a).name +
                        " -> " + l.var(b).name);
        return l.declared_order;
    }
    // Kahn with a min-heap on id: path-constrained pairs keep their order,
    // everything else resolves by declaration index.
    std::vector<VarId> order;
    std::vector<char> placed(l.num_vars(), 0);
    std::vector<VarId> heap;
    auto blocked = [&](VarId d) {
        for (VarId e : decisions)
            if (e != d && !placed[e] && reach[e].count(d)) return true;
        return false;
    };
    for (VarId d : decisions)
        if (!blocked(d)) heap.push_back(d);
    std::make_heap(heap.begin(), heap.end(), std::greater<>());
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        VarId d = heap.back();
        heap.pop_back();
        if (placed[d]) continue;
        placed[d] = 1;
        order.push_back(d);
        for (VarId e : decisions)
            if (!placed[e] && !blocked(e) &&
                std::find(heap.begin(), heap.end(), e) == heap.end()) {
                heap.push_back(e);
                std::push_heap(heap.begin(), heap.end(), std::greater<>());
            }
    }
    if (order.size() != decisions.size())
        throw UnorderableDecisions("decision precedence is cyclic");
    return order;
}

/// Build the blocks for a fixed decision order.
inline PartialOrder partial_order_with(const Limid& l, const std::vector<VarId>& decision_order) {
    PartialOrder po;
    po.decision_order = decision_order;
    po.block_of.assign(l.num_vars(), -1);
    std::vector<char> placed(l.num_vars(), 0);
    int n = static_cast<int>(decision_order.size());
    for (int k = 0; k < n; ++k) {
        VarId d = decision_order[k];
        std::vector<VarId> info;
        for (VarId p : l.parents[d])
            if (l.is_chance(p) && !placed[p]) {
                info.push_back(p);
                placed[p] = 1;
            }
        std::sort(info.begin(), info.end());
        for (VarId v : info) po.block_of[v] = static_cast<int>(po.blocks.size());
        po.blocks.push_back(std::move(info));
        po.block_of[d] = static_cast<int>(po.blocks.size());
        po.blocks.push_back({d});
        placed[d] = 1;
    }
    std::vector<VarId> tail;
    for (VarId v = 0; v < l.num_vars(); ++v)
        if (l.is_chance(v) && !placed[v]) {
            tail.push_back(v);
            po.block_of[v] = static_cast<int>(po.blocks.size());
        }
    po.blocks.push_back(std::move(tail));
    return po;
}

inline PartialOrder partial_order(const Limid& l) {
    return partial_order_with(l, derive_decision_order(l));
}

/// Report every violated invariant; an empty result means the model is valid.
inline std::vector<Violation> validate(const Limid& l) {
    std::vector<Violation> out;
    // unique names
    {
        std::map<std::string, int> seen;
        for (const auto& v : l.variables)
            if (++seen[v.name] == 2)
                out.push_back({ViolationKind::DuplicateName, v.id, -1, -1, 0.0,
                               "duplicate variable name '" + v.name + "'"});
    }
    // cardinalities
    for (const auto& v : l.variables) {
        bool ok = v.kind == VarKind::Utility ? v.cardinality == 0 : v.cardinality >= 1;
        if (!ok)
            out.push_back({ViolationKind::BadCardinality, v.id, -1, -1,
                           static_cast<double>(v.cardinality),
                           "bad cardinality for '" + v.name + "'"});
    }
    // acyclicity
    std::vector<VarId> topo;
    bool acyclic = detail::topological_order(l, topo);
    if (!acyclic)
        out.push_back({ViolationKind::Cycle, -1, -1, -1, 0.0, "the diagram contains a directed cycle"});
    // utilities are leaves
    auto ch = l.children();
    for (VarId v = 0; v < l.num_vars(); ++v)
        if (l.is_utility(v) && !ch[v].empty())
            out.push_back({ViolationKind::UtilityHasChildren, v, ch[v][0], -1, 0.0,
                           "utility '" + l.var(v).name + "' has children"});
    // table lengths and contents
    for (VarId v = 0; v < l.num_vars(); ++v) {
        if (l.is_chance(v)) {
            if (l.cpts[v].size() != l.cpt_len(v)) {
                out.push_back({ViolationKind::WrongTableLength, v, -1, -1,
                               static_cast<double>(l.cpts[v].size()),
                               "cpt of '" + l.var(v).name + "' has wrong length"});
                continue;
            }
            int c = l.card(v);
            for (std::size_t i = 0; i < l.cpts[v].size(); ++i)
                if (l.cpts[v][i] < 0.0)
                    out.push_back({ViolationKind::NegativeProbability, v, -1,
                                   static_cast<long>(i / c), l.cpts[v][i],
                                   "negative probability in '" + l.var(v).name + "'"});
            std::size_t rows = l.parent_states(v);
            for (std::size_t r = 0; r < rows; ++r) {
                double s = 0.0;
                for (int j = 0; j < c; ++j) s += l.cpts[v][r * c + j];
                if (std::abs(s - 1.0) > 1e-9)
                    out.push_back({ViolationKind::CptRowSum, v, -1, static_cast<long>(r), s,
                                   "cpt row " + std::to_string(r) + " of '" + l.var(v).name +
                                       "' sums to " + std::to_string(s)});
            }
        } else if (l.is_utility(v)) {
            if (l.utils[v].size() != l.parent_states(v))
                out.push_back({ViolationKind::WrongTableLength, v, -1, -1,
                               static_cast<double>(l.utils[v].size()),
                               "utility table of '" + l.var(v).name + "' has wrong length"});
        }
    }
    // no-recalling-forgotten-information: once a decision in D_k's memory line
    // stops observing a variable, D_k may not observe it again. A decision D_j
    // belongs to D_k's memory line when a chain of remembered-decision arcs
    // leads from D_j to D_k; without that scoping, independent decision makers
    // (who never shared the observation) would be flagged spuriously.
    if (acyclic) {
        try {
            auto order = derive_decision_order(l);
            int n = static_cast<int>(order.size());
            auto observes = [&](VarId d, VarId v) {
                return std::find(l.parents[d].begin(), l.parents[d].end(), v) !=
                       l.parents[d].end();
            };
            // remembers[j][k]: chain of decision-parent arcs from order[j] to order[k]
            std::vector<std::vector<char>> remembers(n, std::vector<char>(n, 0));
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < k; ++j) {
                    if (observes(order[k], order[j])) remembers[j][k] = 1;
                    for (int m = j + 1; m < k && !remembers[j][k]; ++m)
                        if (remembers[j][m] && observes(order[k], order[m])) remembers[j][k] = 1;
                }
            for (VarId v = 0; v < l.num_vars(); ++v) {
                if (l.is_utility(v)) continue;
                for (int k = 0; k < n; ++k) {
                    if (order[k] == v || !observes(order[k], v)) continue;
                    bool flagged = false;
                    for (int i = 0; i < k && !flagged; ++i) {
                        if (order[i] == v || !observes(order[i], v)) continue;
                        for (int j = i + 1; j < k && !flagged; ++j) {
                            if (order[j] == v || observes(order[j], v)) continue;
                            if (remembers[j][k]) {
                                out.push_back({ViolationKind::NoRecall, v, order[k], -1, 0.0,
                                               "'" + l.var(order[k]).name + "' recalls '" +
                                                   l.var(v).name + "' after '" +
                                                   l.var(order[j]).name + "' forgot it"});
                                flagged = true;
                            }
                        }
                    }
                    if (flagged) break;
                }
            }
        } catch (const UnorderableDecisions&) {
            // ordering problems surface through partial_order, not here
        }
    }
    return out;
}

inline void require_valid(const Limid& l) {
    auto violations = validate(l);
    if (!violations.empty()) {
        std::string msg = "invalid model:";
        for (const auto& v : violations) msg += "\n  " + v.message;
        throw InvalidModel(msg);
    }
}

}  // namespace limid
