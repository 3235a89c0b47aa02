#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msbn/junction_tree.hpp"
#include "msbn/linkage.hpp"
#include "msbn/potential.hpp"
#include "msbn/tour.hpp"

namespace msbn {

enum class Variant { UB1, UB2, UB3 };

const char* to_string(Variant v);
Variant parse_variant(const std::string& s);

struct SessionOptions {
  CostModel cost_model = CostModel::Unit;
  std::size_t oracle_limit = kDefaultOracleLimit;
};

/// Counters of the most recent update. Coordination covers the passes
/// between the first and the last absorb; finalization is the closing full
/// distribution. `weighted_cost` is the coordination cost under the
/// session's cost model.
struct CostReport {
  std::string variant;
  std::vector<std::size_t> order;  // 0-based linkage indices
  std::size_t coordination_passes = 0;
  std::size_t finalization_passes = 0;
  std::size_t payload_entries = 0;
  double weighted_cost = 0.0;
};

/// Unit-weight tree over the linkages, node k named "L{k+1}".
WeightedTree linkage_graph(const LinkageTree& lt);

/// One T^a-absorbs-from-T^b interaction. Opening calibrates both trees and
/// derives the host tree, linkage tree and peer hosts. Sessions are values:
/// copy one to run several variants from the same starting state.
class PairSession {
 public:
  /// Throws ValidationError on structurally invalid trees, an uncovered
  /// d-sepset, or a linkage the peer cannot host.
  static PairSession open(JunctionTree jt_a, JunctionTree jt_b, Scope dsepset, SessionOptions options = {});

  const JunctionTree& tree_a() const { return jt_a_; }
  const JunctionTree& tree_b() const { return jt_b_; }
  /// T^a as it was right after opening.
  const JunctionTree& initial_tree_a() const { return initial_a_; }
  const Scope& dsepset() const { return dsepset_; }
  const HostTree& host_tree() const { return host_; }
  const LinkageTree& linkage_tree() const { return linkages_; }
  const SessionOptions& options() const { return options_; }
  std::size_t linkage_count() const { return linkages_.size(); }

  /// Multiplies B(U_i^a) by B(L_i^b) / B(L_i^a). Counts the linkage payload.
  void absorb_through_linkage(std::size_t i);

  /// Absorb each linkage in `order`, each followed by a full distribution.
  CostReport update_belief(const std::vector<std::size_t>& order);
  /// As update_belief, but intermediate distributions stop at the host tree.
  CostReport update_belief2(const std::vector<std::size_t>& order);
  /// As update_belief, but intermediate distributions follow the host-tree
  /// chain to the next linkage host.
  CostReport update_belief3(const std::vector<std::size_t>& order);
  CostReport run(Variant v, const std::vector<std::size_t>& order);

  /// Order minimizing ub3 coordination cost under `model`.
  std::vector<std::size_t> optimal_linkage_order(CostModel model) const;
  std::vector<std::size_t> optimal_linkage_order() const { return optimal_linkage_order(options_.cost_model); }
  std::vector<std::size_t> default_order() const { return linkages_.indexing; }
  bool is_consistent_order(const std::vector<std::size_t>& order) const;

  /// normalize(joint(T^a) * B(I^b) / B(I^a)) computed from the opening state.
  PotentialTable expected_posterior() const;
  /// Max-abs deviation of T^a's normalized joint from expected_posterior().
  double max_deviation() const;
  /// Normalized single-variable marginals of the d-sepset read from T^a.
  std::vector<PotentialTable> dsepset_marginals() const;

  CostReport cost_report() const { return report_; }

 private:
  PairSession() = default;
  void begin(Variant v, const std::vector<std::size_t>& order);
  CostReport finish();

  JunctionTree jt_a_;
  JunctionTree jt_b_;
  JunctionTree initial_a_;
  Scope dsepset_;
  HostTree host_;
  LinkageTree linkages_;
  SessionOptions options_;

  PassCounter coordination_;
  PassCounter finalization_;
  std::size_t payload_ = 0;
  CostReport report_;
};

}  // namespace msbn
