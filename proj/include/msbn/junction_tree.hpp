#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msbn/potential.hpp"

namespace msbn {

struct Clique {
  std::string id;
  Scope vars;
};

/// Undirected tree edge between clique indices, stored with a < b.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class CostModel { Unit, StateSpace };

const char* to_string(CostModel m);
CostModel parse_cost_model(const std::string& s);

/// Accumulates inter-clique passes. Under CostModel::StateSpace each pass
/// weighs state_space(receiving clique) + state_space(sepset).
struct PassCounter {
  CostModel model = CostModel::Unit;
  std::size_t passes = 0;
  double weighted = 0.0;
};

inline constexpr std::size_t kDefaultOracleLimit = std::size_t{1} << 20;

/// Clique tree with Hugin-style stored sepset beliefs. Cliques are kept in
/// natural id order, so index order is id order. Beliefs start as all-ones.
class JunctionTree {
 public:
  JunctionTree() = default;
  /// Throws std::invalid_argument on duplicate or empty cliques, undefined
  /// edge endpoints, self loops and repeated edges. Tree shape and running
  /// intersection are reported by validate_jt, not enforced here.
  JunctionTree(std::vector<Clique> cliques,
               const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return cliques_.size(); }
  const std::vector<Clique>& cliques() const { return cliques_; }
  const Clique& clique(std::size_t i) const { return cliques_.at(i); }
  const std::string& id(std::size_t i) const { return cliques_.at(i).id; }
  std::optional<std::size_t> find(const std::string& id) const;
  /// Throws std::out_of_range for an unknown id.
  std::size_t index_of(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::optional<std::size_t> edge_between(std::size_t u, std::size_t v) const;
  /// Neighbour indices in ascending order.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  Scope sepset_scope(std::size_t edge) const;

  const PotentialTable& belief(std::size_t i) const { return belief_.at(i); }
  void set_belief(std::size_t i, PotentialTable t);
  const PotentialTable& sepset_belief(std::size_t edge) const { return sepset_belief_.at(edge); }
  void set_sepset_belief(std::size_t edge, PotentialTable t);
  /// Resets every sepset belief to all-ones.
  void reset_sepsets();

  Scope variables() const;
  bool is_tree() const;
  /// Clique indices on the unique path from `from` to `to`, inclusive.
  std::vector<std::size_t> path(std::size_t from, std::size_t to) const;

 private:
  std::vector<Clique> cliques_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<PotentialTable> belief_;
  std::vector<PotentialTable> sepset_belief_;
};

struct StructureReport {
  bool valid = true;
  std::vector<std::string> violations;
};

struct ConsistencyReport {
  bool consistent = true;
  std::optional<std::size_t> worst_edge;
  double max_discrepancy = 0.0;
};

StructureReport validate_jt(const JunctionTree& jt);

void pass_message(JunctionTree& jt, std::size_t from, std::size_t to, PassCounter* counter = nullptr);

/// Inward pass toward `root`, leaves first.
void collect_evidence(JunctionTree& jt, std::size_t root, PassCounter* counter = nullptr);
/// Outward pass from `root`; exactly size() - 1 passes.
void distribute_evidence(JunctionTree& jt, std::size_t root, PassCounter* counter = nullptr);
/// Outward pass from `root` restricted to the connected clique set
/// `allowed`. Throws std::invalid_argument if allowed is disconnected or
/// lacks root.
void distribute_on_subtree(JunctionTree& jt, std::size_t root, const std::vector<std::size_t>& allowed,
                           PassCounter* counter = nullptr);
/// Passes along consecutive pairs of a simple path.
void distribute_on_chain(JunctionTree& jt, const std::vector<std::size_t>& path,
                         PassCounter* counter = nullptr);

/// Collect then distribute from the smallest clique id. Throws
/// ValidationError on a structurally invalid tree.
void calibrate(JunctionTree& jt, PassCounter* counter = nullptr);

/// Product of clique beliefs over product of sepset beliefs on the union
/// scope. Throws OracleLimitExceeded when the joint exceeds `limit` cells.
PotentialTable joint_table(const JunctionTree& jt, std::size_t limit = kDefaultOracleLimit);

ConsistencyReport consistency_check(const JunctionTree& jt, double tol);

}  // namespace msbn
