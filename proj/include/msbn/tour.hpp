#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "msbn/junction_tree.hpp"
#include "msbn/linkage.hpp"

namespace msbn {

/// Undirected tree with positive symmetric edge weights. Nodes are stored
/// in natural id order, so "smallest id" tie-breaks are "smallest index".
class WeightedTree {
 public:
  struct NodeSpec {
    std::string id;
    bool host = true;
  };
  struct EdgeSpec {
    std::string u;
    std::string v;
    double weight = 1.0;
  };
  struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 1.0;
  };

  WeightedTree() = default;
  /// Throws std::invalid_argument on malformed input (duplicate ids, unknown
  /// endpoints, non-positive weights) and ValidationError when the edges do
  /// not form a single tree.
  WeightedTree(std::vector<NodeSpec> nodes, const std::vector<EdgeSpec>& edges);

  std::size_t size() const { return nodes_.size(); }
  const std::string& id(std::size_t i) const { return nodes_.at(i).id; }
  bool host(std::size_t i) const { return nodes_.at(i).host; }
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;

  /// (neighbour, weight) pairs in ascending neighbour order.
  const std::vector<std::pair<std::size_t, double>>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::optional<double> weight(std::size_t u, std::size_t v) const;
  const std::vector<Edge>& edges() const { return edges_; }
  double total_weight() const;

  bool is_leaf(std::size_t i) const { return adjacency_.at(i).size() == 1; }
  /// Leaf indices in ascending order.
  std::vector<std::size_t> leaves() const;
  std::vector<std::string> ids(const std::vector<std::size_t>& idx) const;

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
};

struct TerminalChain {
  std::vector<std::size_t> path;
  double weight = 0.0;
};

struct OpenTour {
  std::vector<std::size_t> walk;
  double weight = 0.0;
};

/// Node order: order[k] is the node numbered k + 1.
struct Numbering {
  std::vector<std::size_t> order;
};

/// f[node][k] = path weight from node to leaves[k].
struct LeafDistances {
  std::vector<std::size_t> leaves;
  std::vector<std::vector<double>> f;
};

struct ChainSearch {
  LeafDistances distances;
  std::vector<double> max_to_leaf;  // M[k] for leaf k
  std::size_t x = 0;                // leaf positions into distances.leaves
  std::size_t y = 0;
  TerminalChain chain;
};

struct TourResult {
  OpenTour tour;
  Numbering numbering;
  TerminalChain chain;
};

struct NumberingWeight {
  Numbering numbering;
  double weight = 0.0;
};

/// Depth-first double traversal from node 0. A single-node tree yields the
/// one-node walk of weight 0.
OpenTour closed_tour(const WeightedTree& tree);

LeafDistances leaf_distances(const WeightedTree& tree);

/// Throws std::invalid_argument when the tree has fewer than two leaves.
ChainSearch heaviest_terminal_chain(const WeightedTree& tree);

/// Minimum-weight open tour and its first-visit numbering. Walks the
/// heaviest terminal chain end to end, detouring depth-first (ascending id)
/// into every off-chain subtree hanging from an internal chain node.
/// Throws std::invalid_argument for a tree with fewer than two nodes.
TourResult min_weight_open_tour(const WeightedTree& tree);

/// Throws std::invalid_argument on a non-adjacent step.
double tour_weight(const WeightedTree& tree, const std::vector<std::size_t>& walk);

/// All-pairs path weights.
std::vector<std::vector<double>> path_weights(const WeightedTree& tree);

/// Sum of path weights between consecutively numbered nodes.
double numbering_weight(const WeightedTree& tree, const Numbering& numbering);

inline constexpr std::size_t kBruteForceLimit = 9;

/// Exhaustive minimum over all n! numberings. Throws std::invalid_argument
/// when the tree has more than `max_nodes` nodes.
NumberingWeight brute_force_min_numbering(const WeightedTree& tree, std::size_t max_nodes = kBruteForceLimit);

/// True iff each node after the first is adjacent to an earlier one.
/// Throws std::invalid_argument if the numbering is not a permutation.
bool check_numbering_consistent(const WeightedTree& tree, const Numbering& numbering);

/// Models the host tree as a weighted tree over which linkage hosts are
/// ordered. Edge weights follow `model`: unit gives 1, statespace gives the
/// mean over both directions of state_space(sepset) + state_space(receiver).
/// Non-host leaves are pruned, non-host nodes of degree two are contracted
/// into a single edge carrying the summed weight, and non-host nodes of
/// higher degree are kept with host = false.
WeightedTree reduce_to_host_tree(const JunctionTree& jt, const HostTree& host,
                                 const std::vector<std::size_t>& hosts, CostModel model);

}  // namespace msbn
