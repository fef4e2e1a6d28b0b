#pragma once

#include <json.hpp>

#include "limid/model.hpp"
#include "limid/search.hpp"

namespace limid {

using json = nlohmann::json;

inline json strategy_to_json(const Limid& l, const Strategy& s) {
    json out;
    out["decisions"] = json::array();
    for (const auto& [d, policy] : s.policies) {
        json jd;
        jd["name"] = l.var(d).name;
        jd["info_vars"] = json::array();
        for (VarId p : l.parents[d]) jd["info_vars"].push_back(l.var(p).name);
        jd["policy"] = policy;
        out["decisions"].push_back(std::move(jd));
    }
    out["expected_utility"] = s.expected_utility;
    return out;
}

inline Strategy strategy_from_json(const Limid& l, const json& in) {
    Strategy s;
    if (!in.contains("decisions") || !in["decisions"].is_array())
        throw SemanticError("strategy json needs a 'decisions' array");
    for (const auto& jd : in["decisions"]) {
        auto id = l.find(jd.at("name").get<std::string>());
        if (!id || !l.is_decision(*id))
            throw SemanticError("strategy json names an unknown decision");
        std::vector<int> policy = jd.at("policy").get<std::vector<int>>();
        if (policy.size() != l.parent_states(*id))
            throw SemanticError("policy for '" + l.var(*id).name + "' has wrong length");
        for (int a : policy)
            if (a < 0 || a >= l.card(*id))
                throw SemanticError("policy for '" + l.var(*id).name + "' has a bad action");
        s.policies[*id] = std::move(policy);
    }
    for (VarId d = 0; d < l.num_vars(); ++d)
        if (l.is_decision(d) && !s.policies.count(d))
            throw SemanticError("strategy json is missing decision '" + l.var(d).name + "'");
    if (in.contains("expected_utility")) s.expected_utility = in["expected_utility"].get<double>();
    return s;
}

inline json stats_to_json(const SearchStats& st) {
    return json{{"expanded", st.expanded},
                {"merged", st.merged},
                {"pruned_bound", st.pruned_bound},
                {"pruned_zero", st.pruned_zero},
                {"sg_size", st.sg_size},
                {"eu", st.eu},
                {"wall_time_ms", st.wall_time_ms},
                {"relaxed_treewidth", st.relaxed_treewidth}};
}

}  // namespace limid
