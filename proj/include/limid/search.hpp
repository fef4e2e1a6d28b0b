#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "limid/analysis.hpp"
#include "limid/jointree.hpp"
#include "limid/model.hpp"
#include "limid/oracle.hpp"

namespace limid {

struct SolveOptions {
    bool merging = true;
    bool bounds = true;
    bool sand = true;
    int treewidth_limit = 25;
    bool audit_bounds = false;  // compute every bound, never prune, count violations
};

struct SearchStats {
    long long expanded = 0;
    long long merged = 0;
    long long pruned_bound = 0;
    long long pruned_zero = 0;
    long long sg_size = 0;
    double eu = 0.0;
    double wall_time_ms = 0.0;
    int relaxed_treewidth = 0;
    long long bound_violations = 0;  // audit mode only
};

enum class NodeKind { And, Or, Sand, Leaf };

/// Node of the searched AND/OR graph. OR arcs carry the stage utilities that
/// resolve with the chosen action as a bonus term, so node values satisfy
/// And = sum of weight*child, Or = max over (bonus + child), Sand = sum.
struct SearchNode {
    NodeKind kind = NodeKind::Leaf;
    VarId var = -1;  // And: chance variable, Or: decision
    double value = 0.0;
    bool solved = false;
    int best_action = -1;
    std::string context;          // Or nodes
    std::vector<int> info_state;  // Or nodes: states of the decision's parents
    struct Arc {
        int state;      // And: chance state, Or: action, Sand: branch index
        double weight;  // And: posterior probability; 1.0 otherwise
        double bonus;   // Or: utilities attached with this action
        int child;
    };
    std::vector<Arc> arcs;
};

struct StrategyGraph {
    std::vector<SearchNode> nodes;  // shared arena of the searched graph
    int root = -1;
};

struct SolveResult {
    Strategy strategy;
    StrategyGraph graph;
    SearchStats stats;
};

namespace detail {

/// Static expansion plan. Sequential positions interleave stage resets,
/// observation pushes and decision nodes; a Sand position forks conditionally
/// independent decision groups into parallel branches.
struct PlanNode {
    enum Kind { Reset, Obs, Or, Sand, End } kind = End;
    VarId var = -1;                    // Obs: chance var; Reset/Or: decision
    int next = -1;                     // following plan position
    std::vector<int> branches;         // Sand
    std::vector<VarId> stage_obs;      // Reset: the stage's observation block
    std::vector<std::pair<VarId, int>> recall_positions;  // Reset: ctx vars (var, order pos)
    std::vector<VarId> key_obs;        // Or: current readings, key prefix
    std::vector<VarId> key_rest;       // Or: remembered variables, key suffix
    std::vector<VarId> attach_utils;   // Or: utilities resolving at this action
    std::vector<char> ub_mask;         // Or: utilities still open in this branch
    std::vector<char> attach_mask;     // Or
};

struct Plan {
    std::vector<PlanNode> nodes;
    int root = -1;
    std::vector<VarId> root_utils;  // utilities with no decision ancestor
    std::vector<char> root_mask;
};

class PlanBuilder {
public:
    PlanBuilder(const Limid& l, const PartialOrder& po, const SolveOptions& opt)
        : l_(l), po_(po), opt_(opt) {
        obs_block_.resize(l.num_vars());
        for (int k = 0; k < po.num_decisions(); ++k)
            obs_block_[po.decision_order[k]] = po.blocks[2 * k];
        order_pos_.assign(l.num_vars(), -1);
        // positions follow the partial order blocks; utilities sit past the end
        int t = 0;
        for (const auto& b : po.blocks)
            for (VarId v : b) order_pos_[v] = t++;
        tau_.assign(l.num_vars(), -1);
        std::vector<int> dpos(l.num_vars(), -1);
        for (std::size_t i = 0; i < po.decision_order.size(); ++i)
            dpos[po.decision_order[i]] = static_cast<int>(i);
        for (VarId u = 0; u < l.num_vars(); ++u) {
            if (!l.is_utility(u)) continue;
            VarId last = -1;
            for (VarId d : po.decision_order) {
                if (descendants_cache_.count(d) == 0) descendants_cache_[d] = descendants(l, d);
                if (descendants_cache_[d].count(u) &&
                    (last < 0 || dpos[d] > dpos[last]))
                    last = d;
            }
            tau_[u] = last;
        }
    }

    Plan build() {
        Plan p;
        for (VarId u = 0; u < l_.num_vars(); ++u)
            if (l_.is_utility(u) && tau_[u] < 0) p.root_utils.push_back(u);
        p.root_mask.assign(l_.num_vars(), 0);
        for (VarId u : p.root_utils) p.root_mask[u] = 1;
        plan_ = &p;
        VarSet instantiated;
        p.root = build_branch(po_.decision_order, {}, -1, instantiated);
        finalize(p.root);
        plan_ = nullptr;
        return p;
    }

private:
    int add_node(PlanNode n) {
        plan_->nodes.push_back(std::move(n));
        return static_cast<int>(plan_->nodes.size()) - 1;
    }

    /// remaining: decisions still to expand in this branch (decision order);
    /// pending: observation variables left in the current stage (empty when
    /// between stages); cur: the stage's decision or -1.
    int build_branch(std::vector<VarId> remaining, std::vector<VarId> pending, VarId cur,
                     VarSet instantiated) {
        if (cur < 0 && remaining.empty()) return -1;
        // conditionally independent groups fork the expansion
        if (opt_.sand && remaining.size() >= 2) {
            auto groups = detect_cids(l_, instantiated, remaining);
            if (groups.size() >= 2) {
                PlanNode sand;
                sand.kind = PlanNode::Sand;
                std::vector<int> branches;
                for (auto& g : groups) {
                    if (cur >= 0 && std::count(g.begin(), g.end(), cur))
                        branches.push_back(build_branch(g, pending, cur, instantiated));
                    else
                        branches.push_back(build_branch(g, {}, -1, instantiated));
                }
                sand.branches = std::move(branches);
                return add_node(std::move(sand));
            }
        }
        if (cur < 0) {
            VarId d = remaining.front();
            PlanNode reset;
            reset.kind = PlanNode::Reset;
            reset.var = d;
            reset.stage_obs = obs_block_[d];
            int id = add_node(std::move(reset));
            plan_->nodes[id].next =
                build_branch(remaining, obs_block_[d], d, instantiated);
            return id;
        }
        if (!pending.empty()) {
            VarId o = pending.front();
            PlanNode obs;
            obs.kind = PlanNode::Obs;
            obs.var = o;
            int id = add_node(std::move(obs));
            instantiated.insert(o);
            plan_->nodes[id].next =
                build_branch(remaining, {pending.begin() + 1, pending.end()}, cur, instantiated);
            return id;
        }
        // the stage's OR node
        PlanNode orn;
        orn.kind = PlanNode::Or;
        orn.var = cur;
        orn.key_obs = obs_block_[cur];
        VarSet before_stage = instantiated;
        for (VarId o : obs_block_[cur]) before_stage.erase(o);
        orn.key_rest = recall_vars(cur, before_stage, remaining);
        orn.ub_mask.assign(l_.num_vars(), 0);
        for (VarId u = 0; u < l_.num_vars(); ++u)
            if (l_.is_utility(u) && tau_[u] >= 0 &&
                (tau_[u] == cur || std::count(remaining.begin(), remaining.end(), tau_[u])))
                orn.ub_mask[u] = 1;
        orn.attach_mask.assign(l_.num_vars(), 0);
        for (VarId u = 0; u < l_.num_vars(); ++u)
            if (l_.is_utility(u) && tau_[u] == cur) {
                orn.attach_utils.push_back(u);
                orn.attach_mask[u] = 1;
            }
        int id = add_node(std::move(orn));
        or_of_[cur] = id;
        instantiated.insert(cur);
        std::vector<VarId> rest_decisions(remaining.begin() + 1, remaining.end());
        plan_->nodes[id].next = build_branch(rest_decisions, {}, -1, instantiated);
        return id;
    }

    /// Variables the stage itself conditions on: the decision's instantiated
    /// parents, plus every instantiated decision that can still influence the
    /// stage's own queries (its observation weights, and the utilities left
    /// open in this branch). Deeper stages' needs are merged in afterwards by
    /// finalize().
    std::vector<VarId> recall_vars(VarId d, const VarSet& instantiated,
                                   const std::vector<VarId>& branch_remaining) {
        VarSet out;
        for (VarId p : l_.parents[d])
            if (instantiated.count(p)) out.insert(p);
        VarSet targets;
        for (VarId o : obs_block_[d]) targets.insert(o);
        for (VarId u = 0; u < l_.num_vars(); ++u)
            if (l_.is_utility(u) && tau_[u] >= 0 &&
                std::count(branch_remaining.begin(), branch_remaining.end(), tau_[u]))
                targets.insert(u);
        VarSet cond1{d};
        for (VarId p : l_.parents[d]) cond1.insert(p);
        VarSet cond2{d};
        for (VarId p : l_.parents[d])
            if (!std::count(obs_block_[d].begin(), obs_block_[d].end(), p)) cond2.insert(p);
        for (VarId j = 0; j < l_.num_vars(); ++j) {
            if (!l_.is_decision(j) || !instantiated.count(j) || out.count(j)) continue;
            VarSet a{j};
            VarSet t1, t2;
            for (VarId v : targets) {
                if (!cond1.count(v) && v != j) t1.insert(v);
                if (!cond2.count(v) && v != j) t2.insert(v);
            }
            if (!d_separated(l_, a, t1, cond1) || !d_separated(l_, a, t2, cond2)) out.insert(j);
        }
        return {out.begin(), out.end()};
    }

    /// Bottom-up pass: a merged node's subtree may condition deeper stages on
    /// variables this stage does not need itself; fold those needs into the
    /// stage's recall set and context key so merging stays consistent with the
    /// values computed below. Returns the subtree's outside references.
    VarSet finalize(int pn) {
        if (pn < 0) return {};
        PlanNode& p = plan_->nodes[pn];
        switch (p.kind) {
            case PlanNode::Reset: {
                VarSet r = finalize(p.next);
                const PlanNode& orn = plan_->nodes[or_of_.at(p.var)];
                p.recall_positions.clear();
                for (VarId v : orn.key_rest) p.recall_positions.push_back({v, order_pos_[v]});
                std::sort(p.recall_positions.begin(), p.recall_positions.end(),
                          [](auto& a, auto& b) { return a.second < b.second; });
                return r;
            }
            case PlanNode::Obs: {
                VarSet r = finalize(p.next);
                r.erase(p.var);
                return r;
            }
            case PlanNode::Sand: {
                VarSet r;
                for (int b : p.branches) {
                    VarSet rb = finalize(b);
                    r.insert(rb.begin(), rb.end());
                }
                return r;
            }
            case PlanNode::Or: {
                VarSet deeper = finalize(p.next);
                deeper.erase(p.var);
                VarSet rest(p.key_rest.begin(), p.key_rest.end());
                VarSet pass_up;
                for (VarId v : deeper) {
                    if (std::count(p.key_obs.begin(), p.key_obs.end(), v))
                        pass_up.insert(v);  // settled by this stage's observations
                    else
                        rest.insert(v);
                }
                p.key_rest.assign(rest.begin(), rest.end());
                std::sort(p.key_rest.begin(), p.key_rest.end(),
                          [&](VarId a, VarId b) { return order_pos_[a] < order_pos_[b]; });
                pass_up.insert(rest.begin(), rest.end());
                return pass_up;
            }
            case PlanNode::End:
                break;
        }
        return {};
    }

    const Limid& l_;
    const PartialOrder& po_;
    const SolveOptions& opt_;
    std::vector<std::vector<VarId>> obs_block_;
    std::vector<int> order_pos_;
    std::vector<VarId> tau_;  // utility -> last decision ancestor
    std::map<VarId, VarSet> descendants_cache_;
    std::map<VarId, int> or_of_;  // decision -> its Or plan node
    Plan* plan_ = nullptr;
};

class Solver {
public:
    Solver(const Limid& l, const SolveOptions& opt)
        : l_(l),
          opt_(opt),
          po_(partial_order(l)),
          relaxed_(build_relaxed(l)),
          tree_(StrongJoinTree::build(l, relaxed_, po_, {opt.treewidth_limit})) {
        plan_ = PlanBuilder(l, po_, opt).build();
        tables_.resize(l.num_vars());
        cur_state_.assign(l.num_vars(), -1);
    }

    SolveResult run() {
        auto t0 = std::chrono::steady_clock::now();
        SolveResult res;
        stats_ = SearchStats{};
        stats_.relaxed_treewidth = tree_.treewidth();
        double root_value =
            plan_.root_utils.empty() ? 0.0 : tree_.expected_utility(plan_.root_mask);
        if (plan_.root == -1) {
            SearchNode leaf;
            leaf.kind = NodeKind::Leaf;
            leaf.value = root_value;
            leaf.solved = true;
            nodes_.push_back(leaf);
            graph_root_ = 0;
            stats_.eu = root_value;
        } else {
            auto [v, node] = expand(plan_.root);
            graph_root_ = node;
            stats_.eu = root_value + v;
        }
        res.graph.nodes = std::move(nodes_);
        res.graph.root = graph_root_;
        extract(res);
        auto t1 = std::chrono::steady_clock::now();
        stats_.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        res.stats = stats_;
        res.strategy.expected_utility = stats_.eu;
        return res;
    }

    const StrongJoinTree& tree() const { return tree_; }
    const RelaxedId& relaxed() const { return relaxed_; }

private:
    std::pair<double, int> expand(int pn) {
        const PlanNode& p = plan_.nodes[pn];
        switch (p.kind) {
            case PlanNode::Reset: {
                std::vector<std::pair<VarId, int>> recalled;
                for (auto& [v, _] : p.recall_positions) recalled.push_back({v, cur_state_[v]});
                tree_.set_recall_evidence(p.var, recalled, p.stage_obs);
                auto out = expand(p.next);
                tree_.pop_evidence();
                return out;
            }
            case PlanNode::Obs: {
                int id = new_node(NodeKind::And, p.var);
                ++stats_.expanded;
                double value = 0.0;
                for (int s = 0; s < l_.card(p.var); ++s) {
                    double prob = tree_.push_evidence(p.var, s);
                    if (prob == 0.0) {
                        ++stats_.pruned_zero;
                        tree_.pop_evidence();
                        continue;
                    }
                    cur_state_[p.var] = s;
                    auto [cv, child] = expand(p.next);
                    nodes_[id].arcs.push_back({s, prob, 0.0, child});
                    value += prob * cv;
                    cur_state_[p.var] = -1;
                    tree_.pop_evidence();
                }
                nodes_[id].value = value;
                nodes_[id].solved = true;
                return {value, id};
            }
            case PlanNode::Sand: {
                int id = new_node(NodeKind::Sand, -1);
                ++stats_.expanded;
                double value = 0.0;
                int bi = 0;
                for (int b : p.branches) {
                    auto [cv, child] = expand(b);
                    nodes_[id].arcs.push_back({bi++, 1.0, 0.0, child});
                    value += cv;
                }
                nodes_[id].value = value;
                nodes_[id].solved = true;
                return {value, id};
            }
            case PlanNode::Or:
                return expand_or(pn);
            case PlanNode::End:
                break;
        }
        throw LimidError("internal: bad plan node");
    }

    std::pair<double, int> expand_or(int pn) {
        const PlanNode& p = plan_.nodes[pn];
        VarId d = p.var;
        std::string key = context_key(p);
        if (opt_.merging) {
            auto it = tables_[d].find(key);
            if (it != tables_[d].end()) {
                ++stats_.merged;
                return {nodes_[it->second].value, it->second};
            }
        }
        int id = new_node(NodeKind::Or, d);
        ++stats_.expanded;
        nodes_[id].context = key;
        for (VarId v : l_.parents[d]) nodes_[id].info_state.push_back(cur_state_[v]);
        double incumbent = -std::numeric_limits<double>::infinity();
        int best = -1;
        for (int a = 0; a < l_.card(d); ++a) {
            tree_.push_evidence(d, a);
            cur_state_[d] = a;
            double ub = 0.0;
            bool have_ub = false;
            if (opt_.bounds || opt_.audit_bounds) {
                ub = tree_.upper_bound(p.ub_mask);
                have_ub = true;
            }
            if (opt_.bounds && !opt_.audit_bounds && ub <= incumbent - kEps) {
                ++stats_.pruned_bound;
                cur_state_[d] = -1;
                tree_.pop_evidence();
                continue;
            }
            double attach =
                p.attach_utils.empty() ? 0.0 : tree_.expected_utility(p.attach_mask);
            double deeper = 0.0;
            int child;
            if (p.next != -1) {
                auto [dv, ch] = expand(p.next);
                deeper = dv;
                child = ch;
                nodes_[id].arcs.push_back({a, 1.0, attach, child});
            } else {
                child = new_node(NodeKind::Leaf, -1);
                nodes_[child].value = attach;
                nodes_[child].solved = true;
                nodes_[id].arcs.push_back({a, 1.0, 0.0, child});
            }
            double val = attach + deeper;
            if (have_ub && ub < val - kEps) ++stats_.bound_violations;
            if (val > incumbent) {
                incumbent = val;
                best = a;
            }
            cur_state_[d] = -1;
            tree_.pop_evidence();
        }
        nodes_[id].value = incumbent;
        nodes_[id].best_action = best;
        nodes_[id].solved = true;
        if (opt_.merging) tables_[d][key] = id;
        return {incumbent, id};
    }

    std::string context_key(const PlanNode& p) const {
        std::string key;
        auto append = [&](VarId v) {
            if (!key.empty()) key += ',';
            key += std::to_string(cur_state_[v]);
        };
        for (VarId v : p.key_obs) append(v);
        for (VarId v : p.key_rest) append(v);
        return key;
    }

    int new_node(NodeKind k, VarId v) {
        SearchNode n;
        n.kind = k;
        n.var = v;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    void extract(SolveResult& res) {
        auto& nodes = res.graph.nodes;
        for (VarId d = 0; d < l_.num_vars(); ++d)
            if (l_.is_decision(d))
                res.strategy.policies[d] = std::vector<int>(l_.parent_states(d), 0);
        if (res.graph.root < 0) return;
        std::map<VarId, std::vector<char>> assigned;
        for (auto& [d, pol] : res.strategy.policies) assigned[d].assign(pol.size(), 0);
        std::vector<char> visited(nodes.size(), 0);
        std::vector<int> stack{res.graph.root};
        long long count = 0;
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            if (visited[id]) continue;
            visited[id] = 1;
            SearchNode& n = nodes[id];
            if (n.kind == NodeKind::Leaf) continue;
            ++count;
            if (n.kind == NodeKind::Or) {
                VarId d = n.var;
                std::size_t idx = 0;
                for (std::size_t i = 0; i < l_.parents[d].size(); ++i)
                    idx = idx * l_.card(l_.parents[d][i]) + n.info_state[i];
                auto& pol = res.strategy.policies[d];
                auto& asg = assigned[d];
                if (asg[idx] && pol[idx] != n.best_action)
                    throw InvalidModel(
                        "policy conflict at decision '" + l_.var(d).name +
                        "': two reachable contexts with the same information state "
                        "disagree on the best action");
                pol[idx] = n.best_action;
                asg[idx] = 1;
                for (auto& arc : n.arcs)
                    if (arc.state == n.best_action) stack.push_back(arc.child);
            } else {
                for (auto& arc : n.arcs) stack.push_back(arc.child);
            }
        }
        stats_.sg_size = count;
    }

    static constexpr double kEps = 1e-9;

    const Limid& l_;
    SolveOptions opt_;
    PartialOrder po_;
    RelaxedId relaxed_;
    StrongJoinTree tree_;
    Plan plan_;
    std::vector<SearchNode> nodes_;
    std::vector<std::unordered_map<std::string, int>> tables_;
    std::vector<int> cur_state_;
    SearchStats stats_;
    int graph_root_ = -1;
};

}  // namespace detail

/// Depth-first branch-and-bound search for an optimal strategy. All option
/// combinations return the same expected utility; they only change how much
/// work the search performs.
inline SolveResult solve(const Limid& l, SolveOptions opt = {}) {
    require_valid(l);
    detail::Solver solver(l, opt);
    return solver.run();
}

/// Independent reachability count of the strategy graph induced by `strategy`:
/// walks a fresh join tree and plan, following the given actions, counting
/// AND/OR/SAND nodes with OR nodes deduplicated by context exactly when
/// `opt.merging` is on. Used to cross-check SearchStats::sg_size.
inline long long strategy_graph_size(const Limid& l, const Strategy& strategy,
                                     SolveOptions opt = {}) {
    require_valid(l);
    PartialOrder po = partial_order(l);
    RelaxedId relaxed = build_relaxed(l);
    StrongJoinTree tree = StrongJoinTree::build(l, relaxed, po, {opt.treewidth_limit});
    detail::Plan plan = detail::PlanBuilder(l, po, opt).build();
    if (plan.root == -1) return 0;
    std::vector<int> cur_state(l.num_vars(), -1);
    std::vector<std::map<std::string, char>> seen(l.num_vars());
    long long count = 0;

    std::function<void(int)> walk = [&](int pn) {
        const detail::PlanNode& p = plan.nodes[pn];
        switch (p.kind) {
            case detail::PlanNode::Reset: {
                std::vector<std::pair<VarId, int>> recalled;
                for (auto& [v, _] : p.recall_positions) recalled.push_back({v, cur_state[v]});
                tree.set_recall_evidence(p.var, recalled, p.stage_obs);
                walk(p.next);
                tree.pop_evidence();
                return;
            }
            case detail::PlanNode::Obs: {
                ++count;
                for (int s = 0; s < l.card(p.var); ++s) {
                    double prob = tree.push_evidence(p.var, s);
                    if (prob == 0.0) {
                        tree.pop_evidence();
                        continue;
                    }
                    cur_state[p.var] = s;
                    walk(p.next);
                    cur_state[p.var] = -1;
                    tree.pop_evidence();
                }
                return;
            }
            case detail::PlanNode::Sand: {
                ++count;
                for (int b : p.branches) walk(b);
                return;
            }
            case detail::PlanNode::Or: {
                VarId d = p.var;
                std::string key;
                auto append = [&](VarId v) {
                    if (!key.empty()) key += ',';
                    key += std::to_string(cur_state[v]);
                };
                for (VarId v : p.key_obs) append(v);
                for (VarId v : p.key_rest) append(v);
                if (opt.merging) {
                    if (seen[d].count(key)) return;
                    seen[d][key] = 1;
                }
                ++count;
                std::size_t idx = 0;
                for (VarId par : l.parents[d]) idx = idx * l.card(par) + cur_state[par];
                int a = strategy.policies.at(d)[idx];
                tree.push_evidence(d, a);
                cur_state[d] = a;
                if (p.next != -1) walk(p.next);
                cur_state[d] = -1;
                tree.pop_evidence();
                return;
            }
            case detail::PlanNode::End:
                return;
        }
    };
    walk(plan.root);
    return count;
}

}  // namespace limid
