#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "msbn/workbench.hpp"

namespace msbn {

namespace {

struct CliqueSpec {
  std::string id;
  std::vector<std::string> vars;
};

// Binary-variable junction tree with seeded positive potentials.
JunctionTree build_binary_jt(const std::vector<CliqueSpec>& specs,
                             const std::vector<std::pair<std::string, std::string>>& edges, Rng& rng) {
  std::vector<Clique> cliques;
  for (const auto& s : specs) {
    std::vector<Variable> vars;
    for (const auto& v : s.vars) vars.push_back(Variable{v, 2});
    cliques.push_back(Clique{s.id, Scope(vars)});
  }
  JunctionTree jt(cliques, edges);
  for (std::size_t i = 0; i < jt.size(); ++i) {
    std::vector<double> values(jt.clique(i).vars.state_space());
    for (auto& v : values) v = rng.uniform(0.05, 1.0);
    jt.set_belief(i, PotentialTable(jt.clique(i).vars, std::move(values)));
  }
  return jt;
}

Scope binary_scope(const std::vector<std::string>& ids) {
  std::vector<Variable> vars;
  for (const auto& v : ids) vars.push_back(Variable{v, 2});
  return Scope(vars);
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

WeightedTree tree_from_edges(const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  std::set<std::string> ids;
  std::vector<WeightedTree::EdgeSpec> specs;
  for (const auto& [u, v, w] : edges) {
    ids.insert(u);
    ids.insert(v);
    specs.push_back({u, v, w});
  }
  std::vector<WeightedTree::NodeSpec> nodes;
  for (const auto& id : ids) nodes.push_back({id, true});
  return WeightedTree(std::move(nodes), specs);
}

// One side of a generated pair: linkage cliques prefix1..prefixM laid out
// on the linkage tree, then private variables folded in.
struct SideLayout {
  std::vector<CliqueSpec> cliques;
  std::vector<std::pair<std::string, std::string>> edges;
};

SideLayout layout_side(const std::vector<std::vector<std::string>>& scopes, const std::vector<std::size_t>& parent,
                       const std::string& prefix, std::size_t n_private, const std::string& private_prefix,
                       Rng& rng) {
  SideLayout side;
  const std::size_t m = scopes.size();
  for (std::size_t i = 0; i < m; ++i) side.cliques.push_back({prefix + std::to_string(i + 1), scopes[i]});
  // Linkage edges that may still be split by a bridge clique.
  std::vector<std::size_t> unbridged;
  for (std::size_t i = 1; i < m; ++i) unbridged.push_back(i);
  std::vector<std::pair<std::string, std::string>> bridged;

  for (std::size_t k = 0; k < n_private; ++k) {
    const std::string p = private_prefix + std::to_string(k + 1);
    const std::size_t kinds = unbridged.empty() ? 2 : 3;
    const auto kind = rng.below(kinds);
    if (kind == 0) {
      side.cliques[rng.below(side.cliques.size())].vars.push_back(p);
    } else if (kind == 1) {
      const auto at = rng.below(side.cliques.size());
      const auto& host_vars = side.cliques[at].vars;
      const std::string shared = host_vars[rng.below(host_vars.size())];
      const std::string id = prefix + std::to_string(side.cliques.size() + 1);
      side.edges.emplace_back(side.cliques[at].id, id);
      side.cliques.push_back({id, {p, shared}});
    } else {
      const auto pick = rng.below(unbridged.size());
      const auto child = unbridged[pick];
      unbridged.erase(unbridged.begin() + static_cast<std::ptrdiff_t>(pick));
      std::vector<std::string> vars{p};
      for (const auto& v : scopes[child])
        if (std::find(scopes[parent[child]].begin(), scopes[parent[child]].end(), v) != scopes[parent[child]].end())
          vars.push_back(v);
      const std::string id = prefix + std::to_string(side.cliques.size() + 1);
      side.cliques.push_back({id, vars});
      side.edges.emplace_back(side.cliques[parent[child]].id, id);
      side.edges.emplace_back(id, side.cliques[child].id);
      bridged.emplace_back(side.cliques[parent[child]].id, side.cliques[child].id);
    }
  }
  for (std::size_t i = 1; i < m; ++i)
    if (std::find(unbridged.begin(), unbridged.end(), i) != unbridged.end())
      side.edges.emplace_back(side.cliques[parent[i]].id, side.cliques[i].id);
  return side;
}

std::size_t binary_cells(std::size_t n, std::size_t limit) {
  std::size_t cells = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (cells > limit / 2) return limit + 1;
    cells *= 2;
  }
  return cells;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

WeightedTree gen_tree(std::size_t n, std::uint64_t seed, long min_weight, long max_weight) {
  if (n < 2) throw std::invalid_argument("gen_tree: n must be at least 2");
  if (min_weight < 1 || max_weight < min_weight) throw std::invalid_argument("gen_tree: bad weight range");
  Rng rng(seed);
  std::vector<std::size_t> prufer(n - 2);
  for (auto& x : prufer) x = rng.below(n);

  std::vector<std::size_t> degree(n, 1);
  for (auto x : prufer) ++degree[x];
  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (auto x : prufer) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    links.emplace_back(leaf, x);
    --degree[leaf];
    --degree[x];
  }
  std::vector<std::size_t> last;
  for (std::size_t i = 0; i < n; ++i)
    if (degree[i] == 1) last.push_back(i);
  links.emplace_back(last[0], last[1]);

  std::vector<WeightedTree::NodeSpec> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back({"v" + std::to_string(i + 1), true});
  std::vector<WeightedTree::EdgeSpec> edges;
  for (auto [u, v] : links)
    edges.push_back({"v" + std::to_string(u + 1), "v" + std::to_string(v + 1),
                     static_cast<double>(rng.between(min_weight, max_weight))});
  return WeightedTree(std::move(nodes), edges);
}

PairData gen_pair(std::size_t n_shared, std::size_t n_private_a, std::size_t n_private_b, std::uint64_t seed,
                  std::size_t max_linkages, std::size_t oracle_limit) {
  if (n_shared == 0) throw std::invalid_argument("gen_pair: need at least one shared variable");
  if (max_linkages == 0) throw std::invalid_argument("gen_pair: max_linkages must be positive");
  if (binary_cells(n_shared + std::max(n_private_a, n_private_b), oracle_limit) > oracle_limit)
    throw std::invalid_argument("gen_pair: joint state space exceeds the oracle limit");
  Rng rng(seed);

  std::vector<std::string> shared;
  for (std::size_t k = 0; k < n_shared; ++k) shared.push_back("I" + std::to_string(k + 1));
  shuffle(shared, rng);
  const std::size_t m = 1 + rng.below(std::min(max_linkages, n_shared));

  // Every linkage owns at least one fresh variable.
  std::vector<std::vector<std::string>> fresh(m);
  for (std::size_t k = 0; k < n_shared; ++k) fresh[k < m ? k : rng.below(m)].push_back(shared[k]);

  std::vector<std::vector<std::string>> scopes(m);
  std::vector<std::size_t> parent(m, 0);
  scopes[0] = fresh[0];
  for (std::size_t i = 1; i < m; ++i) {
    parent[i] = rng.below(i);
    // A proper subset of the parent keeps neighbouring linkages non-nested.
    std::vector<std::string> pool = scopes[parent[i]];
    shuffle(pool, rng);
    pool.resize(rng.below(pool.size()));
    scopes[i] = pool;
    scopes[i].insert(scopes[i].end(), fresh[i].begin(), fresh[i].end());
  }

  const SideLayout a = layout_side(scopes, parent, "C", n_private_a, "A", rng);
  const SideLayout b = layout_side(scopes, parent, "D", n_private_b, "B", rng);
  PairData pair;
  pair.jt_a = build_binary_jt(a.cliques, a.edges, rng);
  pair.jt_b = build_binary_jt(b.cliques, b.edges, rng);
  pair.dsepset = binary_scope(shared);
  return pair;
}

std::vector<std::size_t> random_consistent_order(const LinkageTree& lt, Rng& rng) {
  const std::size_t m = lt.size();
  std::vector<std::size_t> order;
  if (m == 0) return order;
  std::vector<bool> taken(m, false);
  const auto start = rng.below(m);
  order.push_back(start);
  taken[start] = true;
  while (order.size() < m) {
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < m; ++i) {
      if (taken[i]) continue;
      for (auto j : order)
        if (lt.adjacent(i, j)) {
          frontier.push_back(i);
          break;
        }
    }
    if (frontier.empty()) break;
    const auto next = frontier[rng.below(frontier.size())];
    taken[next] = true;
    order.push_back(next);
  }
  return order;
}

// ---------------------------------------------------------------------------
// Fixtures

WeightedTree fig4_tree() {
  return tree_from_edges({{"C1", "C2", 1}, {"C1", "C3", 1}, {"C1", "C4", 1}, {"C2", "C5", 1}});
}

WeightedTree fig5_tree() {
  return tree_from_edges({{"C5", "C2", 1},
                      {"C2", "C6", 1},
                      {"C6", "C7", 1},
                      {"C7", "C8", 1},
                      {"C2", "C1", 1},
                      {"C1", "C9", 1},
                      {"C9", "C10", 1},
                      {"C1", "C3", 1},
                      {"C1", "C4", 1}});
}

WeightedTree fig6_tree() {
  return tree_from_edges({{"C8", "C7", 1},
                      {"C7", "C6", 2},
                      {"C6", "C2", 4},
                      {"C2", "C1", 8},
                      {"C1", "C4", 6},
                      {"C2", "C5", 4},
                      {"C1", "C3", 4},
                      {"C1", "C9", 2},
                      {"C9", "C10", 3}});
}

WeightedTree fig7_tree() {
  return tree_from_edges({{"v2", "v8", 1},
                      {"v8", "v7", 2},
                      {"v7", "v6", 4},
                      {"v6", "v9", 8},
                      {"v9", "v4", 6},
                      {"v6", "v1", 4},
                      {"v9", "v5", 4},
                      {"v9", "v10", 2},
                      {"v10", "v3", 3}});
}

PairData fig4_pair(std::uint64_t seed) {
  Rng rng(seed);
  // d-sepset: X1..X5 owned by one linkage each, S12/S13/S14/S25 carried
  // along the star edges.
  const std::vector<std::pair<std::string, std::string>> shape{{"1", "2"}, {"1", "3"}, {"1", "4"}, {"2", "5"}};
  auto side = [&](const std::string& prefix, const std::string& priv) {
    std::vector<CliqueSpec> cliques{{prefix + "1", {"X1", "S12", "S13", "S14", priv + "1"}},
                                    {prefix + "2", {"X2", "S12", "S25", priv + "2"}},
                                    {prefix + "3", {"X3", "S13", priv + "3"}},
                                    {prefix + "4", {"X4", "S14", priv + "4"}},
                                    {prefix + "5", {"X5", "S25", priv + "5"}}};
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& [u, v] : shape) edges.emplace_back(prefix + u, prefix + v);
    return build_binary_jt(cliques, edges, rng);
  };
  PairData pair;
  pair.jt_a = side("C", "P");
  pair.jt_b = side("D", "Q");
  pair.dsepset = binary_scope({"X1", "X2", "X3", "X4", "X5", "S12", "S13", "S14", "S25"});
  return pair;
}

PairData pair2l(std::uint64_t seed) {
  Rng rng(seed);
  PairData pair;
  pair.jt_a = build_binary_jt({{"C1", {"A", "B", "C"}}, {"C2", {"C", "D", "E"}}}, {{"C1", "C2"}}, rng);
  pair.jt_b = build_binary_jt({{"C1", {"B", "C", "F"}}, {"C2", {"C", "D", "G"}}}, {{"C1", "C2"}}, rng);
  pair.dsepset = binary_scope({"B", "C", "D"});
  return pair;
}

PairData payload10(std::uint64_t seed) {
  Rng rng(seed);
  auto side = [&](const std::string& prefix, const std::string& priv) {
    return build_binary_jt({{prefix + "1", {"I01", "I02", "I03", "I04", "I05", priv + "1"}},
                            {prefix + "2", {"I04", "I05", "I06", "I07", "I08", priv + "2"}},
                            {prefix + "3", {"I06", "I07", "I08", "I09", "I10", priv + "3"}}},
                           {{prefix + "1", prefix + "2"}, {prefix + "2", prefix + "3"}}, rng);
  };
  PairData pair;
  pair.jt_a = side("C", "P");
  pair.jt_b = side("D", "Q");
  pair.dsepset = binary_scope({"I01", "I02", "I03", "I04", "I05", "I06", "I07", "I08", "I09", "I10"});
  return pair;
}

std::vector<std::string> fixture_names() {
  return {"fig4", "fig4-tree", "fig5", "fig6", "fig7", "pair2l", "payload10"};
}

std::string export_fixture(const std::string& name) {
  if (name == "fig4") return serialize_pair(fig4_pair());
  if (name == "fig4-tree") return serialize_tree(fig4_tree());
  if (name == "fig5") return serialize_tree(fig5_tree());
  if (name == "fig6") return serialize_tree(fig6_tree());
  if (name == "fig7") return serialize_tree(fig7_tree());
  if (name == "pair2l") return serialize_pair(pair2l());
  if (name == "payload10") return serialize_pair(payload10());
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

}  // namespace msbn
