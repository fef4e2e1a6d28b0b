#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "limid/model.hpp"

namespace limid {

struct OracleOptions {
    std::size_t joint_cap = 10'000'000;     // max joint chance assignments
    std::size_t strategy_cap = 1'000'000;   // max strategies to enumerate
};

namespace detail {

inline std::size_t joint_chance_size(const Limid& l, std::size_t cap) {
    std::size_t n = 1;
    for (const auto& v : l.variables)
        if (v.kind == VarKind::Chance) {
            n *= static_cast<std::size_t>(v.cardinality);
            if (n > cap) throw TooLarge("joint assignment space exceeds the cap");
        }
    return n;
}

}  // namespace detail

/// Exact expected utility of a strategy by exhaustive enumeration of the joint
/// chance space. Decisions take the actions their policies dictate, which is
/// the deterministic conditional in the induced joint distribution.
inline double strategy_eu(const Limid& l, const Strategy& s, OracleOptions opt = {}) {
    std::vector<VarId> chance = l.vars_of_kind(VarKind::Chance);
    std::vector<VarId> decision_order = derive_decision_order(l);
    for (VarId d : decision_order)
        if (!s.policies.count(d))
            throw InvalidModel("strategy is missing a policy for '" + l.var(d).name + "'");
    detail::joint_chance_size(l, opt.joint_cap);

    std::vector<int> state(l.num_vars(), 0);
    double eu = 0.0;
    while (true) {
        // decisions resolve in order; their parents are already settled
        for (VarId d : decision_order) {
            std::size_t idx = l.parent_index(d, state);
            state[d] = s.policies.at(d)[idx];
        }
        double w = 1.0;
        for (VarId x : chance) {
            std::size_t idx = l.parent_index(x, state) * l.card(x) + state[x];
            w *= l.cpts[x][idx];
            if (w == 0.0) break;
        }
        if (w != 0.0) {
            double u = 0.0;
            for (VarId uvar = 0; uvar < l.num_vars(); ++uvar)
                if (l.is_utility(uvar)) u += l.utils[uvar][l.parent_index(uvar, state)];
            eu += w * u;
        }
        // odometer over chance variables, last one fastest
        int i = static_cast<int>(chance.size()) - 1;
        for (; i >= 0; --i) {
            VarId x = chance[i];
            if (++state[x] < l.card(x)) break;
            state[x] = 0;
        }
        if (i < 0) break;
    }
    return eu;
}

/// Number of strategies, guarded by the cap.
inline std::size_t strategy_count(const Limid& l, std::size_t cap) {
    std::size_t n = 1;
    for (const auto& v : l.variables)
        if (v.kind == VarKind::Decision) {
            std::size_t states = l.parent_states(v.id);
            for (std::size_t j = 0; j < states; ++j) {
                n *= static_cast<std::size_t>(v.cardinality);
                if (n > cap) throw TooLarge("strategy space exceeds the cap");
            }
        }
    return n;
}

/// Brute-force optimal strategy. Policies are enumerated in lexicographic
/// order of the concatenated policy vectors, and ties keep the first
/// (lexicographically smallest) maximizer. Deliberately naive.
inline std::pair<Strategy, double> brute_force_optimal(const Limid& l, OracleOptions opt = {}) {
    std::vector<VarId> decisions = l.vars_of_kind(VarKind::Decision);
    strategy_count(l, opt.strategy_cap);

    Strategy cur;
    for (VarId d : decisions) cur.policies[d] = std::vector<int>(l.parent_states(d), 0);
    Strategy best;
    double best_eu = -std::numeric_limits<double>::infinity();
    while (true) {
        double eu = strategy_eu(l, cur, opt);
        if (eu > best_eu) {
            best_eu = eu;
            best = cur;
        }
        // advance the concatenated policy vector like an odometer (last digit fastest)
        bool carried = true;
        for (auto it = decisions.rbegin(); it != decisions.rend() && carried; ++it) {
            auto& pol = cur.policies[*it];
            for (int j = static_cast<int>(pol.size()) - 1; j >= 0; --j) {
                if (++pol[j] < l.card(*it)) {
                    carried = false;
                    break;
                }
                pol[j] = 0;
            }
        }
        if (carried) break;
    }
    best.expected_utility = best_eu;
    return {best, best_eu};
}

}  // namespace limid
