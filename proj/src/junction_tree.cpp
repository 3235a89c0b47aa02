#include "msbn/junction_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "msbn/error.hpp"
#include "msbn/ids.hpp"

namespace msbn {

const char* to_string(CostModel m) { return m == CostModel::Unit ? "unit" : "statespace"; }

CostModel parse_cost_model(const std::string& s) {
  if (s == "unit") return CostModel::Unit;
  if (s == "statespace") return CostModel::StateSpace;
  throw std::invalid_argument("unknown cost model '" + s + "' (expected unit|statespace)");
}

// ---------------------------------------------------------------------------
// JunctionTree

JunctionTree::JunctionTree(std::vector<Clique> cliques,
                           const std::vector<std::pair<std::string, std::string>>& edges)
    : cliques_(std::move(cliques)) {
  std::sort(cliques_.begin(), cliques_.end(),
            [](const Clique& a, const Clique& b) { return natural_less(a.id, b.id); });
  for (std::size_t i = 0; i < cliques_.size(); ++i) {
    if (cliques_[i].vars.empty()) throw std::invalid_argument("clique '" + cliques_[i].id + "' is empty");
    if (i > 0 && cliques_[i].id == cliques_[i - 1].id)
      throw std::invalid_argument("duplicate clique id '" + cliques_[i].id + "'");
  }
  adjacency_.resize(cliques_.size());
  for (const auto& [u_id, v_id] : edges) {
    const auto u = find(u_id);
    const auto v = find(v_id);
    if (!u) throw std::invalid_argument("edge references undefined clique '" + u_id + "'");
    if (!v) throw std::invalid_argument("edge references undefined clique '" + v_id + "'");
    if (*u == *v) throw std::invalid_argument("self loop on clique '" + u_id + "'");
    if (edge_between(*u, *v)) throw std::invalid_argument("repeated edge " + u_id + "-" + v_id);
    edges_.push_back(Edge{std::min(*u, *v), std::max(*u, *v)});
    adjacency_[*u].push_back(*v);
    adjacency_[*v].push_back(*u);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  for (const auto& c : cliques_) belief_.push_back(PotentialTable::ones(c.vars));
  for (std::size_t e = 0; e < edges_.size(); ++e) sepset_belief_.push_back(PotentialTable::ones(sepset_scope(e)));
}

std::optional<std::size_t> JunctionTree::find(const std::string& id) const {
  auto it = std::lower_bound(cliques_.begin(), cliques_.end(), id,
                             [](const Clique& c, const std::string& key) { return natural_less(c.id, key); });
  if (it == cliques_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - cliques_.begin());
}

std::size_t JunctionTree::index_of(const std::string& id) const {
  const auto i = find(id);
  if (!i) throw std::out_of_range("unknown clique '" + id + "'");
  return *i;
}

std::optional<std::size_t> JunctionTree::edge_between(std::size_t u, std::size_t v) const {
  const Edge key{std::min(u, v), std::max(u, v)};
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e] == key) return e;
  return std::nullopt;
}

Scope JunctionTree::sepset_scope(std::size_t edge) const {
  const Edge& e = edges_.at(edge);
  return cliques_[e.a].vars.intersect(cliques_[e.b].vars);
}

void JunctionTree::set_belief(std::size_t i, PotentialTable t) {
  if (!(t.scope() == cliques_.at(i).vars))
    throw std::invalid_argument("belief scope " + t.scope().to_string() + " does not match clique '" +
                                cliques_[i].id + "' " + cliques_[i].vars.to_string());
  belief_[i] = std::move(t);
}

void JunctionTree::set_sepset_belief(std::size_t edge, PotentialTable t) {
  if (!(t.scope() == sepset_scope(edge))) throw std::invalid_argument("sepset belief scope mismatch");
  sepset_belief_.at(edge) = std::move(t);
}

void JunctionTree::reset_sepsets() {
  for (std::size_t e = 0; e < edges_.size(); ++e) sepset_belief_[e] = PotentialTable::ones(sepset_scope(e));
}

Scope JunctionTree::variables() const {
  Scope all;
  for (const auto& c : cliques_) all = all.unite(c.vars);
  return all;
}

bool JunctionTree::is_tree() const {
  if (cliques_.empty()) return false;
  if (edges_.size() + 1 != cliques_.size()) return false;
  std::vector<bool> seen(cliques_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adjacency_[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
  }
  return count == cliques_.size();
}

std::vector<std::size_t> JunctionTree::path(std::size_t from, std::size_t to) const {
  std::vector<std::size_t> parent(cliques_.size(), cliques_.size());
  std::vector<std::size_t> stack{from};
  parent.at(from) = from;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    if (u == to) break;
    for (auto v : adjacency_[u])
      if (parent[v] == cliques_.size()) {
        parent[v] = u;
        stack.push_back(v);
      }
  }
  if (parent.at(to) == cliques_.size())
    throw std::invalid_argument("no path between '" + id(from) + "' and '" + id(to) + "'");
  std::vector<std::size_t> out{to};
  while (out.back() != from) out.push_back(parent[out.back()]);
  std::reverse(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Structure

StructureReport validate_jt(const JunctionTree& jt) {
  StructureReport r;
  auto fail = [&r](std::string msg) {
    r.valid = false;
    r.violations.push_back(std::move(msg));
  };
  if (jt.size() == 0) {
    fail("no cliques");
    return r;
  }
  if (!jt.is_tree()) {
    if (jt.edges().size() + 1 > jt.size())
      fail("not a tree: edges contain a cycle");
    else
      fail("not a tree: cliques are disconnected");
    return r;
  }
  // Running intersection: the cliques holding each variable must form a
  // connected subtree.
  const Scope all = jt.variables();
  for (const auto& var : all.vars()) {
    std::vector<std::size_t> holders;
    for (std::size_t i = 0; i < jt.size(); ++i)
      if (jt.clique(i).vars.contains(var.id)) holders.push_back(i);
    for (std::size_t k = 1; k < holders.size(); ++k) {
      for (auto c : jt.path(holders[0], holders[k])) {
        if (!jt.clique(c).vars.contains(var.id)) {
          fail("running intersection violated: '" + var.id + "' is in '" + jt.id(holders[0]) + "' and '" +
               jt.id(holders[k]) + "' but not in '" + jt.id(c) + "'");
          break;
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Message passing

void pass_message(JunctionTree& jt, std::size_t from, std::size_t to, PassCounter* counter) {
  const auto edge = jt.edge_between(from, to);
  if (!edge)
    throw std::invalid_argument("pass_message: '" + jt.id(from) + "' and '" + jt.id(to) + "' are not adjacent");
  const Scope sep = jt.sepset_scope(*edge);
  PotentialTable fresh = marginalize(jt.belief(from), sep);
  const PotentialTable ratio = divide(fresh, jt.sepset_belief(*edge));
  jt.set_belief(to, multiply(jt.belief(to), ratio));
  jt.set_sepset_belief(*edge, std::move(fresh));
  if (counter) {
    counter->passes += 1;
    counter->weighted += counter->model == CostModel::Unit
                             ? 1.0
                             : static_cast<double>(jt.clique(to).vars.state_space() + sep.state_space());
  }
}

namespace {

// Directed edges (parent, child) in preorder from root, limited to `allowed`.
std::vector<std::pair<std::size_t, std::size_t>> preorder_edges(const JunctionTree& jt, std::size_t root,
                                                                const std::vector<bool>& allowed) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t u, std::size_t parent) {
    for (auto v : jt.neighbors(u)) {
      if (v == parent || !allowed[v]) continue;
      out.emplace_back(u, v);
      visit(v, u);
    }
  };
  visit(root, jt.size());
  return out;
}

void require_root(const JunctionTree& jt, std::size_t root) {
  if (root >= jt.size()) throw std::out_of_range("root clique index out of range");
}

}  // namespace

void collect_evidence(JunctionTree& jt, std::size_t root, PassCounter* counter) {
  require_root(jt, root);
  auto edges = preorder_edges(jt, root, std::vector<bool>(jt.size(), true));
  // Reversed preorder visits every child before its parent.
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) pass_message(jt, it->second, it->first, counter);
}

void distribute_evidence(JunctionTree& jt, std::size_t root, PassCounter* counter) {
  require_root(jt, root);
  for (auto [u, v] : preorder_edges(jt, root, std::vector<bool>(jt.size(), true))) pass_message(jt, u, v, counter);
}

void distribute_on_subtree(JunctionTree& jt, std::size_t root, const std::vector<std::size_t>& allowed,
                           PassCounter* counter) {
  require_root(jt, root);
  std::vector<bool> mask(jt.size(), false);
  for (auto c : allowed) mask.at(c) = true;
  if (!mask[root]) throw std::invalid_argument("distribute_on_subtree: root '" + jt.id(root) + "' not in subtree");
  const auto edges = preorder_edges(jt, root, mask);
  const auto distinct = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (edges.size() + 1 != distinct) throw std::invalid_argument("distribute_on_subtree: clique set is not connected");
  for (auto [u, v] : edges) pass_message(jt, u, v, counter);
}

void distribute_on_chain(JunctionTree& jt, const std::vector<std::size_t>& path, PassCounter* counter) {
  std::set<std::size_t> seen;
  for (auto c : path) {
    if (c >= jt.size()) throw std::out_of_range("chain clique index out of range");
    if (!seen.insert(c).second) throw std::invalid_argument("chain repeats clique '" + jt.id(c) + "'");
  }
  for (std::size_t k = 1; k < path.size(); ++k)
    if (!jt.edge_between(path[k - 1], path[k]))
      throw std::invalid_argument("chain step '" + jt.id(path[k - 1]) + "' -> '" + jt.id(path[k]) +
                                  "' is not an edge");
  for (std::size_t k = 1; k < path.size(); ++k) pass_message(jt, path[k - 1], path[k], counter);
}

void calibrate(JunctionTree& jt, PassCounter* counter) {
  const auto report = validate_jt(jt);
  if (!report.valid) throw ValidationError("calibrate: " + report.violations.front());
  collect_evidence(jt, 0, counter);
  distribute_evidence(jt, 0, counter);
}

// ---------------------------------------------------------------------------
// Oracles

PotentialTable joint_table(const JunctionTree& jt, std::size_t limit) {
  const Scope all = jt.variables();
  // Guard against overflow when computing the state space.
  std::size_t cells = 1;
  for (const auto& v : all.vars()) {
    if (cells > limit / v.cardinality)
      throw OracleLimitExceeded("joint over " + std::to_string(all.size()) + " variables exceeds oracle limit " +
                                std::to_string(limit));
    cells *= v.cardinality;
  }
  PotentialTable joint = PotentialTable::ones(all);
  for (std::size_t i = 0; i < jt.size(); ++i) joint = multiply(joint, jt.belief(i));
  for (std::size_t e = 0; e < jt.edges().size(); ++e) joint = divide(joint, jt.sepset_belief(e));
  return joint;
}

ConsistencyReport consistency_check(const JunctionTree& jt, double tol) {
  ConsistencyReport r;
  for (std::size_t e = 0; e < jt.edges().size(); ++e) {
    const Scope sep = jt.sepset_scope(e);
    const auto ma = marginalize(jt.belief(jt.edges()[e].a), sep);
    const auto mb = marginalize(jt.belief(jt.edges()[e].b), sep);
    double d;
    if (ma.total() > 0.0 && mb.total() > 0.0)
      d = max_abs_diff(normalize(ma), normalize(mb));
    else
      d = (ma.total() > 0.0 || mb.total() > 0.0) ? 1.0 : 0.0;
    if (!r.worst_edge || d > r.max_discrepancy) {
      r.max_discrepancy = d;
      r.worst_edge = e;
    }
  }
  r.consistent = r.max_discrepancy <= tol;
  return r;
}

}  // namespace msbn
