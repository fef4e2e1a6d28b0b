#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <set>
#include <vector>

#include "limid/model.hpp"

namespace limid {

using VarSet = std::set<VarId>;

inline VarSet descendants(const Limid& l, VarId v) {
    auto ch = l.children();
    VarSet out;
    std::deque<VarId> q(ch[v].begin(), ch[v].end());
    while (!q.empty()) {
        VarId w = q.front();
        q.pop_front();
        if (out.insert(w).second)
            for (VarId c : ch[w]) q.push_back(c);
    }
    return out;
}

inline VarSet ancestors_of_set(const Limid& l, const VarSet& s) {
    VarSet out = s;
    std::deque<VarId> q(s.begin(), s.end());
    while (!q.empty()) {
        VarId w = q.front();
        q.pop_front();
        for (VarId p : l.parents[w])
            if (out.insert(p).second) q.push_back(p);
    }
    return out;
}

/// Standard d-separation over the diagram's DAG; utility nodes take part as
/// ordinary leaves. True iff every path between A and B is blocked given Z.
inline bool d_separated(const Limid& l, const VarSet& A, const VarSet& B, const VarSet& Z) {
    if (A.empty() || B.empty()) return true;
    auto ch = l.children();
    VarSet anz = ancestors_of_set(l, Z);
    // reachability with direction: 0 = arrived from a child (up), 1 = from a parent (down)
    std::vector<std::array<char, 2>> seen(l.num_vars(), {0, 0});
    std::deque<std::pair<VarId, int>> q;
    for (VarId a : A) q.push_back({a, 0});
    while (!q.empty()) {
        auto [v, dir] = q.front();
        q.pop_front();
        if (seen[v][dir]) continue;
        seen[v][dir] = 1;
        if (B.count(v)) return false;
        bool observed = Z.count(v) != 0;
        if (dir == 0) {  // arriving from a child
            if (!observed) {
                for (VarId p : l.parents[v]) q.push_back({p, 0});
                for (VarId c : ch[v]) q.push_back({c, 1});
            }
        } else {  // arriving from a parent
            if (!observed)
                for (VarId c : ch[v]) q.push_back({c, 1});
            if (anz.count(v))  // collider (or observed ancestor) opens upward travel
                for (VarId p : l.parents[v]) q.push_back({p, 0});
        }
    }
    return true;
}

inline bool d_separated(const Limid& l, VarId a, const VarSet& B, const VarSet& Z) {
    return d_separated(l, VarSet{a}, B, Z);
}

/// Information arc (i, d) is non-requisite when i is independent of d's
/// utility descendants given d and its remaining parents.
inline bool arc_non_requisite(const Limid& l, VarId info, VarId d) {
    VarSet desc = descendants(l, d);
    VarSet target;
    for (VarId u : desc)
        if (l.is_utility(u)) target.insert(u);
    VarSet cond{d};
    for (VarId p : l.parents[d])
        if (p != info) cond.insert(p);
    return d_separated(l, info, target, cond);
}

namespace detail {

inline std::vector<int> topo_position(const Limid& l) {
    std::vector<VarId> topo;
    topological_order(l, topo);
    std::vector<int> pos(l.num_vars(), 0);
    for (std::size_t i = 0; i < topo.size(); ++i) pos[topo[i]] = static_cast<int>(i);
    return pos;
}

/// One removal sweep over a single decision, to a fixed point. Parents are
/// visited in reverse topological order; removing an arc can expose others.
inline bool shrink_decision_parents(Limid& w, VarId d,
                                    std::vector<std::pair<VarId, VarId>>* removed) {
    auto pos = topo_position(w);
    bool any = false;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<VarId> ps = w.parents[d];
        std::sort(ps.begin(), ps.end(), [&](VarId a, VarId b) { return pos[a] > pos[b]; });
        for (VarId p : ps) {
            if (arc_non_requisite(w, p, d)) {
                auto& par = w.parents[d];
                par.erase(std::find(par.begin(), par.end(), p));
                if (removed) removed->push_back({p, d});
                changed = true;
                any = true;
            }
        }
    }
    return any;
}

}  // namespace detail

/// Delete non-requisite information arcs to a fixed point, sweeping decisions
/// in reverse of the decision order. Returns the deleted arcs in removal order.
inline std::vector<std::pair<VarId, VarId>> non_requisite_arcs(const Limid& l) {
    Limid w = l;
    std::vector<VarId> order = derive_decision_order(w);
    std::vector<std::pair<VarId, VarId>> removed;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            changed |= detail::shrink_decision_parents(w, *it, &removed);
    }
    return removed;
}

/// Relaxation of a diagram: each decision observes its sufficient information
/// set and every non-requisite arc is deleted. The relaxed optimum bounds the
/// original optimum from above.
struct RelaxedId {
    Limid limid;
    std::map<VarId, std::vector<VarId>> sis;  // per decision, sorted by id
    std::vector<std::pair<VarId, VarId>> removed_arcs;  // original arcs gone in the relaxed diagram
};

namespace detail {

/// Candidate state for a decision: chance variables whose value is settled
/// before the decision acts, i.e. not downstream of it or any later decision.
inline VarSet sis_candidates(const Limid& w, const std::vector<VarId>& order, int k) {
    VarSet excluded;
    for (std::size_t m = k; m < order.size(); ++m) {
        excluded.insert(order[m]);
        VarSet ds = descendants(w, order[m]);
        excluded.insert(ds.begin(), ds.end());
    }
    VarSet out;
    for (VarId v = 0; v < w.num_vars(); ++v)
        if (w.is_chance(v) && !excluded.count(v)) out.insert(v);
    return out;
}

inline void install_sis(Limid& w, const std::vector<VarId>& order, int k) {
    VarId d = order[k];
    VarSet cand = sis_candidates(w, order, k);
    for (VarId p : w.parents[d]) cand.insert(p);
    w.parents[d].assign(cand.begin(), cand.end());
    detail::shrink_decision_parents(w, d, nullptr);
}

}  // namespace detail

/// Sufficient information set of `d`, assuming later decisions' SIS are
/// already installed as their parents in `l`.
inline std::vector<VarId> sufficient_information_set(const Limid& l, VarId d) {
    Limid w = l;
    std::vector<VarId> order = derive_decision_order(w);
    int k = static_cast<int>(std::find(order.begin(), order.end(), d) - order.begin());
    detail::install_sis(w, order, k);
    auto out = w.parents[d];
    std::sort(out.begin(), out.end());
    return out;
}

inline RelaxedId build_relaxed(const Limid& l) {
    RelaxedId r;
    Limid w = l;
    std::vector<VarId> order = derive_decision_order(w);
    for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k)
        detail::install_sis(w, order, k);
    // global reduction pass; installing an earlier SIS can expose further removals
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            changed |= detail::shrink_decision_parents(w, *it, nullptr);
    }
    for (VarId d : order) {
        std::sort(w.parents[d].begin(), w.parents[d].end());
        r.sis[d] = w.parents[d];
        for (VarId p : l.parents[d])
            if (!std::count(w.parents[d].begin(), w.parents[d].end(), p))
                r.removed_arcs.push_back({p, d});
    }
    r.limid = std::move(w);
    return r;
}

/// Partition the not-yet-expanded decisions into maximal groups that are
/// d-separated from one another given the observed prefix. Each group is
/// listed in decision order; groups are ordered by their first decision.
inline std::vector<std::vector<VarId>> detect_cids(const Limid& l, const VarSet& observed,
                                                   const std::vector<VarId>& remaining) {
    int m = static_cast<int>(remaining.size());
    std::vector<VarSet> closure(m);
    for (int i = 0; i < m; ++i) {
        VarId d = remaining[i];
        closure[i].insert(d);
        for (VarId p : l.parents[d])
            if (!observed.count(p)) closure[i].insert(p);
        for (VarId u : descendants(l, d))
            if (l.is_utility(u)) closure[i].insert(u);
    }
    // union-find over groups
    std::vector<int> rep(m);
    for (int i = 0; i < m; ++i) rep[i] = i;
    std::function<int(int)> find = [&](int i) { return rep[i] == i ? i : rep[i] = find(rep[i]); };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            if (find(i) == find(j)) continue;
            bool overlap = false;
            for (VarId v : closure[i])
                if (closure[j].count(v)) { overlap = true; break; }
            if (overlap || !d_separated(l, closure[i], closure[j], observed))
                rep[find(j)] = find(i);
        }
    std::map<int, std::vector<VarId>> groups;
    for (int i = 0; i < m; ++i) groups[find(i)].push_back(remaining[i]);
    std::vector<std::vector<VarId>> out;
    out.reserve(groups.size());
    for (auto& [_, g] : groups) out.push_back(std::move(g));
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

inline std::vector<std::vector<VarId>> detect_cids(const Limid& l, const VarSet& observed) {
    std::vector<VarId> remaining;
    for (VarId d : derive_decision_order(l))
        if (!observed.count(d)) remaining.push_back(d);
    return detect_cids(l, observed, remaining);
}

}  // namespace limid
