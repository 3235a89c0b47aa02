#include "msbn/tour.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "msbn/error.hpp"
#include "msbn/ids.hpp"

namespace msbn {

// ---------------------------------------------------------------------------
// WeightedTree

WeightedTree::WeightedTree(std::vector<NodeSpec> nodes, const std::vector<EdgeSpec>& edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return natural_less(a.id, b.id); });
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i].id == nodes_[i - 1].id) throw std::invalid_argument("duplicate node id '" + nodes_[i].id + "'");
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  adjacency_.resize(nodes_.size());
  for (const auto& e : edges) {
    const auto u = find(e.u);
    const auto v = find(e.v);
    if (!u) throw std::invalid_argument("edge references undefined node '" + e.u + "'");
    if (!v) throw std::invalid_argument("edge references undefined node '" + e.v + "'");
    if (*u == *v) throw std::invalid_argument("self loop on node '" + e.u + "'");
    if (!(e.weight > 0.0)) throw std::invalid_argument("edge " + e.u + "-" + e.v + " has non-positive weight");
    if (weight(*u, *v)) throw std::invalid_argument("repeated edge " + e.u + "-" + e.v);
    edges_.push_back(Edge{std::min(*u, *v), std::max(*u, *v), e.weight});
    adjacency_[*u].emplace_back(*v, e.weight);
    adjacency_[*v].emplace_back(*u, e.weight);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });

  if (edges_.size() + 1 != nodes_.size()) throw ValidationError("not a tree: edge count must be node count - 1");
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto [v, w] : adjacency_[u])
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
  }
  if (reached != nodes_.size()) throw ValidationError("not a tree: graph is disconnected");
}

std::optional<std::size_t> WeightedTree::find(const std::string& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const NodeSpec& n, const std::string& key) { return natural_less(n.id, key); });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t WeightedTree::index_of(const std::string& id) const {
  const auto i = find(id);
  if (!i) throw std::out_of_range("unknown node '" + id + "'");
  return *i;
}

std::optional<double> WeightedTree::weight(std::size_t u, std::size_t v) const {
  for (auto [n, w] : adjacency_.at(u))
    if (n == v) return w;
  return std::nullopt;
}

double WeightedTree::total_weight() const {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight;
  return s;
}

std::vector<std::size_t> WeightedTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (is_leaf(i)) out.push_back(i);
  return out;
}

std::vector<std::string> WeightedTree::ids(const std::vector<std::size_t>& idx) const {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(id(i));
  return out;
}

// ---------------------------------------------------------------------------
// Tours

OpenTour closed_tour(const WeightedTree& tree) {
  OpenTour t;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t u, std::size_t parent) {
    t.walk.push_back(u);
    for (auto [v, w] : tree.neighbors(u)) {
      if (v == parent) continue;
      t.weight += w;
      visit(v, u);
      t.weight += w;
      t.walk.push_back(u);
    }
  };
  visit(0, tree.size());
  return t;
}

namespace {

// Path weights from `source` to every node.
std::vector<double> distances_from(const WeightedTree& tree, std::size_t source) {
  std::vector<double> dist(tree.size(), -1.0);
  dist[source] = 0.0;
  std::vector<std::size_t> stack{source};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto [v, w] : tree.neighbors(u))
      if (dist[v] < 0.0) {
        dist[v] = dist[u] + w;
        stack.push_back(v);
      }
  }
  return dist;
}

std::vector<std::size_t> tree_path(const WeightedTree& tree, std::size_t from, std::size_t to) {
  std::vector<std::size_t> parent(tree.size(), tree.size());
  parent[from] = from;
  std::vector<std::size_t> stack{from};
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto [v, w] : tree.neighbors(u))
      if (parent[v] == tree.size()) {
        parent[v] = u;
        stack.push_back(v);
      }
  }
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

LeafDistances leaf_distances(const WeightedTree& tree) {
  LeafDistances d;
  d.leaves = tree.leaves();
  d.f.assign(tree.size(), std::vector<double>(d.leaves.size(), 0.0));
  for (std::size_t k = 0; k < d.leaves.size(); ++k) {
    const auto dist = distances_from(tree, d.leaves[k]);
    for (std::size_t i = 0; i < tree.size(); ++i) d.f[i][k] = dist[i];
  }
  return d;
}

ChainSearch heaviest_terminal_chain(const WeightedTree& tree) {
  ChainSearch s;
  s.distances = leaf_distances(tree);
  const auto& leaves = s.distances.leaves;
  if (leaves.size() < 2) throw std::invalid_argument("heaviest_terminal_chain: tree needs at least two leaves");
  const std::size_t m = leaves.size();
  s.max_to_leaf.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = s.distances.f[leaves[i]];
    s.max_to_leaf[i] = *std::max_element(row.begin(), row.end());
  }
  // max_element returns the first maximum: smallest leaf index wins ties.
  s.x = static_cast<std::size_t>(std::max_element(s.max_to_leaf.begin(), s.max_to_leaf.end()) - s.max_to_leaf.begin());
  for (std::size_t j = 0; j < m; ++j)
    if (s.distances.f[leaves[s.x]][j] == s.max_to_leaf[s.x]) {
      s.y = j;
      break;
    }
  s.chain.path = tree_path(tree, leaves[s.x], leaves[s.y]);
  s.chain.weight = s.max_to_leaf[s.x];
  return s;
}

TourResult min_weight_open_tour(const WeightedTree& tree) {
  if (tree.size() < 2) throw std::invalid_argument("min_weight_open_tour: tree needs at least two nodes");
  TourResult r;
  r.chain = heaviest_terminal_chain(tree).chain;

  std::vector<bool> on_chain(tree.size(), false);
  for (auto c : r.chain.path) on_chain[c] = true;
  std::vector<bool> numbered(tree.size(), false);

  auto record = [&](std::size_t u) {
    r.tour.walk.push_back(u);
    if (!numbered[u]) {
      numbered[u] = true;
      r.numbering.order.push_back(u);
    }
  };
  std::function<void(std::size_t, std::size_t)> detour = [&](std::size_t u, std::size_t parent) {
    record(u);
    for (auto [v, w] : tree.neighbors(u)) {
      if (v == parent) continue;
      r.tour.weight += w;
      detour(v, u);
      r.tour.weight += w;
      record(u);
    }
  };

  const auto& chain = r.chain.path;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto z = chain[k];
    record(z);
    for (auto [v, w] : tree.neighbors(z)) {
      if (on_chain[v]) continue;
      r.tour.weight += w;
      detour(v, z);
      r.tour.weight += w;
      record(z);
    }
    if (k + 1 < chain.size()) r.tour.weight += *tree.weight(z, chain[k + 1]);
  }
  return r;
}

double tour_weight(const WeightedTree& tree, const std::vector<std::size_t>& walk) {
  double total = 0.0;
  for (std::size_t k = 1; k < walk.size(); ++k) {
    const auto w = tree.weight(walk[k - 1], walk[k]);
    if (!w)
      throw std::invalid_argument("tour step " + tree.id(walk[k - 1]) + " -> " + tree.id(walk[k]) +
                                  " is not an edge");
    total += *w;
  }
  return total;
}

std::vector<std::vector<double>> path_weights(const WeightedTree& tree) {
  std::vector<std::vector<double>> d(tree.size());
  for (std::size_t i = 0; i < tree.size(); ++i) d[i] = distances_from(tree, i);
  return d;
}

double numbering_weight(const WeightedTree& tree, const Numbering& numbering) {
  const auto d = path_weights(tree);
  double total = 0.0;
  for (std::size_t k = 1; k < numbering.order.size(); ++k) total += d[numbering.order[k - 1]][numbering.order[k]];
  return total;
}

NumberingWeight brute_force_min_numbering(const WeightedTree& tree, std::size_t max_nodes) {
  const std::size_t n = tree.size();
  if (n > max_nodes)
    throw std::invalid_argument("brute_force_min_numbering: " + std::to_string(n) + " nodes exceeds limit " +
                                std::to_string(max_nodes));
  const auto d = path_weights(tree);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  NumberingWeight best{Numbering{perm}, std::numeric_limits<double>::infinity()};
  do {
    double w = 0.0;
    for (std::size_t k = 1; k < n && w < best.weight; ++k) w += d[perm[k - 1]][perm[k]];
    if (w < best.weight) best = NumberingWeight{Numbering{perm}, w};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n <= 1) best.weight = 0.0;
  return best;
}

bool check_numbering_consistent(const WeightedTree& tree, const Numbering& numbering) {
  const auto& order = numbering.order;
  if (order.size() != tree.size()) throw std::invalid_argument("numbering is not a permutation: wrong length");
  std::vector<bool> seen(tree.size(), false);
  for (auto u : order) {
    if (u >= tree.size() || seen[u]) throw std::invalid_argument("numbering is not a permutation");
    seen[u] = true;
  }
  std::fill(seen.begin(), seen.end(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0) {
      bool linked = false;
      for (auto [v, w] : tree.neighbors(order[k]))
        if (seen[v]) linked = true;
      if (!linked) return false;
    }
    seen[order[k]] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Host-tree reduction

WeightedTree reduce_to_host_tree(const JunctionTree& jt, const HostTree& host,
                                 const std::vector<std::size_t>& hosts, CostModel model) {
  if (hosts.empty()) throw std::invalid_argument("reduce_to_host_tree: no hosts given");
  std::set<std::size_t> is_host(hosts.begin(), hosts.end());
  for (auto h : hosts)
    if (!host.contains(h)) throw std::invalid_argument("host clique '" + jt.id(h) + "' is not in the host tree");

  // Working multigraph keyed by clique index.
  std::map<std::size_t, std::map<std::size_t, double>> adj;
  for (auto c : host.cliques) adj[c];
  for (const auto& e : host.edges) {
    double w = 1.0;
    if (model == CostModel::StateSpace) {
      const auto sep = jt.clique(e.a).vars.intersect(jt.clique(e.b).vars).state_space();
      const double toward_b = static_cast<double>(sep + jt.clique(e.b).vars.state_space());
      const double toward_a = static_cast<double>(sep + jt.clique(e.a).vars.state_space());
      w = 0.5 * (toward_a + toward_b);
    }
    adj[e.a][e.b] = w;
    adj[e.b][e.a] = w;
  }

  auto drop = [&adj](std::size_t c) {
    for (auto [nb, w] : adj[c]) adj[nb].erase(c);
    adj.erase(c);
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = adj.begin(); it != adj.end(); ++it) {
      const auto c = it->first;
      if (is_host.count(c) || adj.size() == 1) continue;
      if (it->second.size() <= 1) {
        drop(c);
        changed = true;
        break;
      }
      if (it->second.size() == 2) {
        auto nb = it->second.begin();
        const auto [u, wu] = *nb++;
        const auto [v, wv] = *nb;
        drop(c);
        adj[u][v] = wu + wv;
        adj[v][u] = wu + wv;
        changed = true;
        break;
      }
    }
  }

  std::vector<WeightedTree::NodeSpec> nodes;
  std::vector<WeightedTree::EdgeSpec> edges;
  for (const auto& [c, nbs] : adj) {
    nodes.push_back({jt.id(c), is_host.count(c) > 0});
    for (auto [d, w] : nbs)
      if (c < d) edges.push_back({jt.id(c), jt.id(d), w});
  }
  return WeightedTree(std::move(nodes), edges);
}

}  // namespace msbn
