#pragma once

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "limid/analysis.hpp"
#include "limid/model.hpp"
#include "limid/table.hpp"

namespace limid {

struct JoinTreeOptions {
    int treewidth_limit = 25;
};

/// Strong join tree over the relaxed diagram. Carries two synchronized views:
/// calibrated Hugin potentials for incremental evidence posteriors, and static
/// per-clique factors for strong (sum/max) utility queries. Mutations are
/// journaled on an evidence stack so backtracking restores tables exactly.
class StrongJoinTree {
public:
    struct Clique {
        std::vector<VarId> scope;       // sorted by id
        int parent = -1;                // toward the strong root
        std::vector<int> children;
        std::vector<VarId> separator;   // scope ∩ parent scope
        std::vector<VarId> own;         // scope \ separator, strong elimination order
        Table prob;                     // Hugin potential
        Table factor;                   // static product of assigned CPTs
        std::vector<VarId> util_vars;   // utilities hosted here
    };

    static StrongJoinTree build(const Limid& original, const RelaxedId& relaxed,
                                const PartialOrder& original_po, JoinTreeOptions opt = {}) {
        StrongJoinTree t;
        t.limid_ = relaxed.limid;
        t.build_structure(original_po, opt);
        t.build_search_order(original, original_po);
        t.init_potentials();
        return t;
    }

    int treewidth() const { return treewidth_; }
    const std::vector<Clique>& cliques() const { return cliques_; }
    const std::vector<Table>& separator_tables() const { return sep_tables_; }
    const std::vector<std::pair<int, int>>& separator_edges() const { return sep_edges_; }

    /// Total instantiation order the search follows: the original diagram's
    /// partial order, with ties broken so consecutive variables live in nearby
    /// cliques.
    const std::vector<VarId>& search_order() const { return search_order_; }

    int evidence_state(VarId v) const { return evid_[v]; }
    std::size_t evidence_depth() const { return frames_.size(); }

    /// Install `v = state`, returning P(v = state | evidence since the last
    /// reset). Messages flow along the clique path from the previous host.
    double push_evidence(VarId v, int state) {
        if (v < 0 || v >= limid_.num_vars() || limid_.is_utility(v))
            throw StaleOrder("cannot push evidence on this variable");
        if (state < 0 || state >= limid_.card(v)) throw StaleOrder("state out of range");
        if (evid_[v] >= 0)
            throw StaleOrder("'" + limid_.var(v).name + "' already has evidence");
        if (!loose_) {
            std::size_t pos = next_pos_;
            if (pos >= search_order_.size() || search_order_[pos] != v)
                throw StaleOrder("'" + limid_.var(v).name + "' pushed out of sequence");
        }
        Frame f;
        f.kind = Frame::Push;
        f.prev_frontier = frontier_;
        f.prev_next_pos = next_pos_;
        f.evid_changes.push_back({v, evid_[v]});
        int host = var_host_[v];
        if (frontier_ >= 0 && frontier_ != host) walk(frontier_, host, f);
        Table& phi = cliques_[host].prob;
        double tot = total(phi);
        double part = 0.0;
        {
            int pos = phi.position_of(v);
            std::size_t st = phi.stride(pos);
            for (std::size_t i = 0; i < phi.data.size(); ++i)
                if (phi.state_at(i, pos, st) == state) part += phi.data[i];
        }
        double posterior = limid_.is_decision(v) ? 1.0 : (tot > 0.0 ? part / tot : 0.0);
        save_clique(f, host);
        condition_in(phi, v, state);
        evid_[v] = state;
        frontier_ = host;
        if (!loose_) ++next_pos_;
        frames_.push_back(std::move(f));
        return posterior;
    }

    /// Undo the most recent push or reset; tables are restored bit for bit.
    void pop_evidence() {
        if (frames_.empty()) throw EmptyStack();
        Frame& f = frames_.back();
        for (auto& [idx, data] : f.saved_cliques) cliques_[idx].prob.data = std::move(data);
        for (auto& [idx, data] : f.saved_seps) sep_tables_[idx].data = std::move(data);
        for (auto& [v, s] : f.evid_changes) evid_[v] = s;
        frontier_ = f.prev_frontier;
        next_pos_ = f.prev_next_pos;
        if (f.kind == Frame::Reset) loose_ = f.prev_loose;
        frames_.pop_back();
    }

    /// Begin a decision's stage: restore the no-evidence calibration, install
    /// only what the decision still knows, and aim messages at the clique that
    /// hosts its first information variable.
    void set_recall_evidence(VarId decision, const std::vector<std::pair<VarId, int>>& recalled,
                             const std::vector<VarId>& stage_obs = {}) {
        Frame f;
        f.kind = Frame::Reset;
        f.prev_frontier = frontier_;
        f.prev_next_pos = next_pos_;
        f.prev_loose = loose_;
        for (int i = 0; i < static_cast<int>(cliques_.size()); ++i) save_clique(f, i);
        for (int i = 0; i < static_cast<int>(sep_tables_.size()); ++i) save_sep(f, i);
        for (VarId v = 0; v < limid_.num_vars(); ++v)
            if (evid_[v] >= 0) f.evid_changes.push_back({v, evid_[v]});
        for (const auto& [v, s] : recalled)
            if (evid_[v] < 0) f.evid_changes.push_back({v, -1});

        for (std::size_t i = 0; i < cliques_.size(); ++i) cliques_[i].prob.data = pristine_cliques_[i];
        for (std::size_t i = 0; i < sep_tables_.size(); ++i) sep_tables_[i].data = pristine_seps_[i];
        std::fill(evid_.begin(), evid_.end(), -1);
        for (const auto& [v, s] : recalled) {
            evid_[v] = s;
            condition_in(cliques_[var_host_[v]].prob, v, s);
        }
        int root = stage_obs.empty() ? var_host_[decision] : var_host_[stage_obs.front()];
        calibrate(root, nullptr);
        frontier_ = root;
        loose_ = true;
        frames_.push_back(std::move(f));
    }

    /// Maximum expected utility of the relaxed diagram consistent with the
    /// current evidence, restricted to the masked utility variables: sum out
    /// chance, maximize over un-instantiated decisions, in strong order.
    double upper_bound(const std::vector<char>& util_mask) const {
        Table phi_root, psi_root;
        strong_collect(util_mask, phi_root, psi_root);
        double phi = phi_root.data.empty() ? 0.0 : phi_root.data[0];
        double psi = psi_root.data.empty() ? 0.0 : psi_root.data[0];
        return phi == 0.0 ? 0.0 : psi / phi;
    }

    /// Same propagation; reads as the conditional expectation when no
    /// un-instantiated decision influences the masked utilities.
    double expected_utility(const std::vector<char>& util_mask) const {
        return upper_bound(util_mask);
    }

    std::vector<char> full_util_mask() const {
        std::vector<char> m(limid_.num_vars(), 0);
        for (VarId v = 0; v < limid_.num_vars(); ++v)
            if (limid_.is_utility(v)) m[v] = 1;
        return m;
    }

    /// Bitwise snapshot of every potential, for restore-exactness checks.
    std::vector<std::vector<double>> snapshot() const {
        std::vector<std::vector<double>> out;
        for (const auto& c : cliques_) out.push_back(c.prob.data);
        for (const auto& s : sep_tables_) out.push_back(s.data);
        return out;
    }

    int host_of(VarId v) const { return var_host_[v]; }
    bool used_elimination_tree_fallback() const { return used_fallback_; }
    const Limid& relaxed_limid() const { return limid_; }

private:
    struct Frame {
        enum Kind { Push, Reset } kind = Push;
        std::vector<std::pair<int, std::vector<double>>> saved_cliques;
        std::vector<std::pair<int, std::vector<double>>> saved_seps;
        std::vector<std::pair<VarId, int>> evid_changes;  // var, previous state
        int prev_frontier = -1;
        std::size_t prev_next_pos = 0;
        bool prev_loose = false;
        std::set<int> touched_cliques, touched_seps;
    };

    // ---- construction -----------------------------------------------------

    void build_structure(const PartialOrder& original_po, const JoinTreeOptions& opt) {
        const Limid& l = limid_;
        int n = l.num_vars();
        PartialOrder po = partial_order_with(l, original_po.decision_order);

        // strong order: blocks first to last; sigma position per variable
        std::vector<int> sigma(n, -1);
        std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
        auto connect = [&](VarId a, VarId b) {
            if (a != b) adj[a][b] = adj[b][a] = 1;
        };
        for (VarId v = 0; v < n; ++v) {
            if (l.is_utility(v)) {
                for (VarId p : l.parents[v])
                    for (VarId q : l.parents[v]) connect(p, q);
            } else {
                for (VarId p : l.parents[v]) connect(p, v);
                for (VarId p : l.parents[v])
                    for (VarId q : l.parents[v]) connect(p, q);
            }
        }
        // eliminate in reverse block order, min-fill within each chance block
        std::vector<char> gone(n, 1);
        std::vector<VarId> nonutil;
        for (VarId v = 0; v < n; ++v)
            if (!l.is_utility(v)) {
                gone[v] = 0;
                nonutil.push_back(v);
            }
        std::vector<VarId> elim_seq;
        std::vector<std::vector<VarId>> candidates;
        auto eliminate = [&](VarId v) {
            std::vector<VarId> nb{v};
            for (VarId w : nonutil)
                if (!gone[w] && adj[v][w]) nb.push_back(w);
            std::sort(nb.begin(), nb.end());
            for (VarId a : nb)
                for (VarId b : nb)
                    if (a != v && b != v) connect(a, b);
            gone[v] = 1;
            elim_seq.push_back(v);
            candidates.push_back(nb);
        };
        auto fill_cost = [&](VarId v) {
            std::vector<VarId> nb;
            for (VarId w : nonutil)
                if (!gone[w] && adj[v][w]) nb.push_back(w);
            int fills = 0;
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j)
                    if (!adj[nb[i]][nb[j]]) ++fills;
            return fills;
        };
        int spos = 0;
        for (const auto& block : po.blocks)
            for (VarId v : block) sigma[v] = spos++;
        for (auto bit = po.blocks.rbegin(); bit != po.blocks.rend(); ++bit) {
            std::vector<VarId> block = *bit;
            while (!block.empty()) {
                VarId best = -1;
                int best_cost = 0;
                for (VarId v : block) {
                    int c = fill_cost(v);
                    if (best < 0 || c < best_cost || (c == best_cost && v < best)) {
                        best = v;
                        best_cost = c;
                    }
                }
                eliminate(best);
                block.erase(std::find(block.begin(), block.end(), best));
            }
        }
        sigma_ = sigma;

        // maximal cliques
        std::vector<char> keep(candidates.size(), 1);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            for (std::size_t j = 0; j < candidates.size(); ++j)
                if (i != j && keep[i] &&
                    (candidates[i].size() < candidates[j].size() ||
                     (candidates[i].size() == candidates[j].size() && i < j)) &&
                    std::includes(candidates[j].begin(), candidates[j].end(),
                                  candidates[i].begin(), candidates[i].end()))
                    keep[i] = 0;
        std::vector<std::vector<VarId>> kept;
        std::vector<std::size_t> kept_step;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (keep[i]) {
                kept.push_back(candidates[i]);
                kept_step.push_back(i);
            }
        treewidth_ = 0;
        for (const auto& c : kept) treewidth_ = std::max(treewidth_, static_cast<int>(c.size()) - 1);
        if (treewidth_ > opt.treewidth_limit) throw TreewidthExceeded(treewidth_, opt.treewidth_limit);

        // maximum-weight spanning tree on separator sizes, then root it at the
        // clique of the last-eliminated variable; fall back to the
        // elimination-derived tree if the rooted result is not strong
        int m = static_cast<int>(kept.size());
        std::vector<int> parent(m, -1);
        auto isect = [&](int a, int b) {
            std::vector<VarId> out;
            std::set_intersection(kept[a].begin(), kept[a].end(), kept[b].begin(), kept[b].end(),
                                  std::back_inserter(out));
            return out;
        };
        int root = 0;
        if (m > 0) {
            VarId last = elim_seq.back();
            for (int i = 0; i < m; ++i)
                if (std::count(kept[i].begin(), kept[i].end(), last)) {
                    root = i;
                    break;
                }
        }
        {
            // Prim from the root, weights = |intersection|, deterministic ties
            std::vector<char> in_tree(m, 0);
            in_tree[root] = 1;
            for (int added = 1; added < m; ++added) {
                int bi = -1, bj = -1, bw = -1;
                for (int i = 0; i < m; ++i)
                    if (in_tree[i])
                        for (int j = 0; j < m; ++j)
                            if (!in_tree[j]) {
                                int w = static_cast<int>(isect(i, j).size());
                                if (w > bw || (w == bw && (j < bj || (j == bj && i < bi)))) {
                                    bw = w;
                                    bi = i;
                                    bj = j;
                                }
                            }
                parent[bj] = bi;
                in_tree[bj] = 1;
            }
        }
        auto strong_ok = [&](const std::vector<int>& par) {
            for (int i = 0; i < m; ++i) {
                if (par[i] < 0) continue;
                auto sep = isect(i, par[i]);
                int max_sep = -1, min_res = 1 << 30;
                for (VarId v : sep) max_sep = std::max(max_sep, sigma_[v]);
                for (VarId v : kept[i])
                    if (!std::count(sep.begin(), sep.end(), v)) min_res = std::min(min_res, sigma_[v]);
                if (min_res <= max_sep) return false;
            }
            return true;
        };
        if (!strong_ok(parent)) {
            used_fallback_ = true;
            // elimination-derived tree: parent holds the residual after the
            // clique's first variable is eliminated
            std::vector<int> par2(m, -1);
            for (int i = 0; i < m; ++i) {
                std::size_t step = kept_step[i];
                std::vector<VarId> rest;
                for (VarId v : kept[i])
                    if (v != elim_seq[step]) rest.push_back(v);
                if (rest.empty()) continue;
                for (std::size_t j2 = step + 1; j2 < candidates.size(); ++j2) {
                    int owner = -1;
                    for (int k2 = 0; k2 < m; ++k2)
                        if (kept_step[k2] == j2) owner = k2;
                    if (owner < 0 || owner == i) continue;
                    if (std::includes(kept[owner].begin(), kept[owner].end(), rest.begin(),
                                      rest.end())) {
                        par2[i] = owner;
                        break;
                    }
                }
                if (par2[i] < 0) {
                    for (int k2 = 0; k2 < m; ++k2)
                        if (k2 != i && std::includes(kept[k2].begin(), kept[k2].end(), rest.begin(),
                                                     rest.end())) {
                            par2[i] = k2;
                            break;
                        }
                }
            }
            parent = par2;
            root = -1;
            for (int i = m - 1; i >= 0; --i)
                if (parent[i] < 0) {
                    if (root < 0) root = i;
                    else parent[i] = root;  // disconnected component, empty separator
                }
            assert(strong_ok(parent));
        }

        cliques_.assign(m, {});
        for (int i = 0; i < m; ++i) {
            cliques_[i].scope = kept[i];
            cliques_[i].parent = parent[i];
            if (parent[i] >= 0) {
                cliques_[i].separator = isect(i, parent[i]);
                cliques_[parent[i]].children.push_back(i);
            }
        }
        root_ = root;
        for (int i = 0; i < m; ++i) {
            auto& c = cliques_[i];
            for (VarId v : c.scope)
                if (!std::count(c.separator.begin(), c.separator.end(), v)) c.own.push_back(v);
            // eliminate later sigma positions first
            std::sort(c.own.begin(), c.own.end(),
                      [&](VarId a, VarId b) { return sigma_[a] > sigma_[b]; });
        }
        // post-order for collects, parents after children
        postorder_.clear();
        std::vector<int> stack{root_};
        std::vector<int> order;
        while (!stack.empty()) {
            int c = stack.back();
            stack.pop_back();
            order.push_back(c);
            for (int ch : cliques_[c].children) stack.push_back(ch);
        }
        postorder_.assign(order.rbegin(), order.rend());
        // separator table registry
        sep_edges_.clear();
        sep_index_.assign(m, -1);
        for (int i = 0; i < m; ++i)
            if (cliques_[i].parent >= 0) {
                sep_index_[i] = static_cast<int>(sep_edges_.size());
                sep_edges_.push_back({i, cliques_[i].parent});
            }
        // hosts: family clique per chance/decision variable, one per utility
        var_host_.assign(n, -1);
        util_host_.assign(n, -1);
        for (VarId v = 0; v < n; ++v) {
            std::vector<VarId> fam;
            if (l.is_utility(v)) {
                fam = l.parents[v];
            } else {
                fam = l.parents[v];
                fam.push_back(v);
            }
            std::sort(fam.begin(), fam.end());
            int found = -1;
            for (int i = 0; i < m && found < 0; ++i)
                if (std::includes(cliques_[i].scope.begin(), cliques_[i].scope.end(), fam.begin(),
                                  fam.end()))
                    found = i;
            assert(found >= 0);
            if (l.is_utility(v)) {
                util_host_[v] = found;
                cliques_[found].util_vars.push_back(v);
            } else {
                var_host_[v] = found;
            }
        }
        // clique depths for path walks
        depth_.assign(m, 0);
        {
            std::deque<int> bfs{root_};
            while (!bfs.empty()) {
                int c = bfs.front();
                bfs.pop_front();
                for (int ch : cliques_[c].children) {
                    depth_[ch] = depth_[c] + 1;
                    bfs.push_back(ch);
                }
            }
        }
    }

    void build_search_order(const Limid& original, const PartialOrder& po) {
        // DFS preorder index per clique
        std::vector<int> dfs_index(cliques_.size(), 0);
        {
            int t = 0;
            std::vector<int> stack{root_};
            while (!stack.empty()) {
                int c = stack.back();
                stack.pop_back();
                dfs_index[c] = t++;
                for (auto it = cliques_[c].children.rbegin(); it != cliques_[c].children.rend(); ++it)
                    stack.push_back(*it);
            }
        }
        search_order_.clear();
        for (const auto& block : po.blocks) {
            std::vector<VarId> b = block;
            std::sort(b.begin(), b.end(), [&](VarId x, VarId y) {
                int dx = dfs_index[var_host_[x]], dy = dfs_index[var_host_[y]];
                return dx != dy ? dx < dy : x < y;
            });
            for (VarId v : b) search_order_.push_back(v);
        }
        (void)original;
    }

    void init_potentials() {
        const Limid& l = limid_;
        for (auto& c : cliques_) {
            std::vector<int> cards;
            for (VarId v : c.scope) cards.push_back(l.card(v));
            c.prob = Table(c.scope, cards, 1.0);
            c.factor = Table(c.scope, cards, 1.0);
        }
        sep_tables_.clear();
        for (auto& [child, par] : sep_edges_) {
            const auto& sep = cliques_[child].separator;
            std::vector<int> cards;
            for (VarId v : sep) cards.push_back(l.card(v));
            sep_tables_.emplace_back(sep, cards, 1.0);
        }
        for (VarId v = 0; v < l.num_vars(); ++v) {
            if (!l.is_chance(v)) continue;
            Table cpt = l.cpt_table(v);
            multiply_in(cliques_[var_host_[v]].prob, cpt);
            multiply_in(cliques_[var_host_[v]].factor, cpt);
        }
        evid_.assign(l.num_vars(), -1);
        calibrate(root_, nullptr);
        pristine_cliques_.clear();
        pristine_seps_.clear();
        for (const auto& c : cliques_) pristine_cliques_.push_back(c.prob.data);
        for (const auto& s : sep_tables_) pristine_seps_.push_back(s.data);
    }

    // ---- message passing ---------------------------------------------------

    int sep_table_between(int a, int b) const {
        if (cliques_[a].parent == b) return sep_index_[a];
        assert(cliques_[b].parent == a);
        return sep_index_[b];
    }

    void pass_message(int from, int to, Frame* f) {
        int si = sep_table_between(from, to);
        Table& sep = sep_tables_[si];
        Table msg = sum_marginal(cliques_[from].prob, sep.scope);
        if (f) {
            save_sep(*f, si);
            save_clique(*f, to);
        }
        multiply_ratio_in(cliques_[to].prob, msg, sep);
        sep.data = std::move(msg.data);
    }

    /// Full two-phase calibration with `center` as the temporary root.
    void calibrate(int center, Frame* f) {
        int m = static_cast<int>(cliques_.size());
        std::vector<int> par(m, -2), order;
        std::deque<int> bfs{center};
        par[center] = -1;
        while (!bfs.empty()) {
            int c = bfs.front();
            bfs.pop_front();
            order.push_back(c);
            auto push_nb = [&](int nb) {
                if (par[nb] == -2) {
                    par[nb] = c;
                    bfs.push_back(nb);
                }
            };
            if (cliques_[c].parent >= 0) push_nb(cliques_[c].parent);
            for (int ch : cliques_[c].children) push_nb(ch);
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it)
            if (par[*it] >= 0) pass_message(*it, par[*it], f);
        for (int c : order)
            if (par[c] >= 0) pass_message(par[c], c, f);
    }

    void walk(int from, int to, Frame& f) {
        // climb to the least common ancestor, passing messages stepwise
        std::vector<int> up, down;
        int a = from, b = to;
        while (depth_[a] > depth_[b]) {
            up.push_back(a);
            a = cliques_[a].parent;
        }
        while (depth_[b] > depth_[a]) {
            down.push_back(b);
            b = cliques_[b].parent;
        }
        while (a != b) {
            up.push_back(a);
            a = cliques_[a].parent;
            down.push_back(b);
            b = cliques_[b].parent;
        }
        int cur = from;
        for (std::size_t i = 1; i <= up.size(); ++i) {
            int nxt = i < up.size() ? up[i] : a;
            pass_message(cur, nxt, &f);
            cur = nxt;
        }
        for (auto it = down.rbegin(); it != down.rend(); ++it) {
            pass_message(cur, *it, &f);
            cur = *it;
        }
    }

    void save_clique(Frame& f, int idx) {
        if (f.touched_cliques.insert(idx).second)
            f.saved_cliques.push_back({idx, cliques_[idx].prob.data});
    }
    void save_sep(Frame& f, int idx) {
        if (f.touched_seps.insert(idx).second) f.saved_seps.push_back({idx, sep_tables_[idx].data});
    }

    // ---- strong propagation over the factor view ---------------------------

    void apply_evidence(Table& t) const {
        for (VarId v : t.scope)
            if (evid_[v] >= 0) condition_in(t, v, evid_[v]);
    }

    void strong_collect(const std::vector<char>& util_mask, Table& phi_root,
                        Table& psi_root) const {
        std::vector<Table> phi_msg(cliques_.size()), psi_msg(cliques_.size());
        for (int c : postorder_) {
            const Clique& cl = cliques_[c];
            Table phi = cl.factor;
            apply_evidence(phi);
            Table usum(cl.scope, phi.cards, 0.0);
            for (VarId uv : cl.util_vars)
                if (util_mask[uv]) add_scaled_in(usum, limid_.util_table(uv));
            Table psi(cl.scope, phi.cards, 0.0);
            for (std::size_t i = 0; i < psi.data.size(); ++i) psi.data[i] = phi.data[i] * usum.data[i];
            for (int ch : cl.children) {
                IndexMap map(phi, phi_msg[ch]);
                for (std::size_t i = 0; i < phi.data.size(); ++i) {
                    std::size_t j = map(i);
                    psi.data[i] = psi.data[i] * phi_msg[ch].data[j] + phi.data[i] * psi_msg[ch].data[j];
                    phi.data[i] *= phi_msg[ch].data[j];
                }
                phi_msg[ch] = Table();  // release
                psi_msg[ch] = Table();
            }
            for (VarId v : cl.own) {
                if (limid_.is_decision(v) && evid_[v] < 0) {
                    max_out(phi, psi, v);
                } else {
                    phi = sum_out(phi, v);
                    psi = sum_out(psi, v);
                }
            }
            if (cl.parent >= 0) {
                phi_msg[c] = std::move(phi);
                psi_msg[c] = std::move(psi);
            } else {
                phi_root = std::move(phi);
                psi_root = std::move(psi);
            }
        }
    }

    /// Max-eliminate a decision jointly from the (phi, psi) pair; phi is
    /// constant across actions by strongness, so psi picks the action.
    static void max_out(Table& phi, Table& psi, VarId v) {
        std::vector<VarId> target;
        for (VarId w : phi.scope)
            if (w != v) target.push_back(w);
        std::vector<int> cards;
        for (VarId w : target) cards.push_back(phi.cards[phi.position_of(w)]);
        Table phi2(target, cards, 0.0), psi2(target, cards, 0.0);
        std::vector<char> seen(phi2.data.size(), 0);
        IndexMap map(phi, phi2);
        for (std::size_t i = 0; i < phi.data.size(); ++i) {
            std::size_t j = map(i);
            if (!seen[j] || psi.data[i] > psi2.data[j]) {
                psi2.data[j] = psi.data[i];
                phi2.data[j] = phi.data[i];
                seen[j] = 1;
            }
        }
        phi = std::move(phi2);
        psi = std::move(psi2);
    }

    Limid limid_;
    std::vector<Clique> cliques_;
    std::vector<Table> sep_tables_;
    std::vector<std::pair<int, int>> sep_edges_;  // (child, parent)
    std::vector<int> sep_index_;                  // clique -> its parent separator table
    std::vector<int> postorder_;
    std::vector<int> depth_;
    std::vector<int> sigma_;
    std::vector<int> var_host_, util_host_;
    std::vector<std::vector<double>> pristine_cliques_, pristine_seps_;
    std::vector<int> evid_;
    std::vector<Frame> frames_;
    std::vector<VarId> search_order_;
    int root_ = 0;
    int frontier_ = -1;
    std::size_t next_pos_ = 0;
    bool loose_ = false;
    int treewidth_ = 0;
    bool used_fallback_ = false;
};

}  // namespace limid
