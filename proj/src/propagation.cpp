#include "msbn/propagation.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "msbn/error.hpp"

namespace msbn {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::UB1: return "ub1";
    case Variant::UB2: return "ub2";
    case Variant::UB3: return "ub3";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "ub1") return Variant::UB1;
  if (s == "ub2") return Variant::UB2;
  if (s == "ub3") return Variant::UB3;
  throw std::invalid_argument("unknown variant '" + s + "' (expected ub1|ub2|ub3)");
}

WeightedTree linkage_graph(const LinkageTree& lt) {
  std::vector<WeightedTree::NodeSpec> nodes;
  std::vector<WeightedTree::EdgeSpec> edges;
  for (std::size_t i = 0; i < lt.size(); ++i) nodes.push_back({"L" + std::to_string(i + 1), true});
  for (auto [a, b] : lt.edges) edges.push_back({"L" + std::to_string(a + 1), "L" + std::to_string(b + 1), 1.0});
  return WeightedTree(std::move(nodes), edges);
}

PairSession PairSession::open(JunctionTree jt_a, JunctionTree jt_b, Scope dsepset, SessionOptions options) {
  for (const auto* jt : {&jt_a, &jt_b}) {
    const auto report = validate_jt(*jt);
    if (!report.valid) throw ValidationError((jt == &jt_a ? "jt_a: " : "jt_b: ") + report.violations.front());
  }
  const Scope vars_b = jt_b.variables();
  for (const auto& v : dsepset.vars())
    if (!vars_b.contains(v.id)) throw ValidationError("d-sepset variable '" + v.id + "' does not occur in jt_b");

  PairSession s;
  s.options_ = options;
  s.dsepset_ = std::move(dsepset);
  calibrate(jt_a);
  calibrate(jt_b);
  s.host_ = build_host_tree(jt_a, s.dsepset_);
  s.linkages_ = build_linkage_tree(jt_a, s.host_, s.dsepset_);
  if (!validate_linkage_cover(s.linkages_, s.dsepset_))
    throw ValidationError("linkage tree of jt_a does not cover exactly the d-sepset " + s.dsepset_.to_string());
  assign_hosts(s.linkages_, jt_b);
  s.jt_a_ = std::move(jt_a);
  s.jt_b_ = std::move(jt_b);
  s.initial_a_ = s.jt_a_;
  s.coordination_.model = s.finalization_.model = options.cost_model;
  return s;
}

void PairSession::absorb_through_linkage(std::size_t i) {
  const Linkage& l = linkages_.linkages.at(i);
  const auto peer = marginalize(jt_b_.belief(*l.host_b), l.vars);
  const auto local = marginalize(jt_a_.belief(l.host_a), l.vars);
  jt_a_.set_belief(l.host_a, multiply(jt_a_.belief(l.host_a), divide(peer, local)));
  payload_ += l.vars.state_space();
}

bool PairSession::is_consistent_order(const std::vector<std::size_t>& order) const {
  try {
    return check_numbering_consistent(linkage_graph(linkages_), Numbering{order});
  } catch (const std::invalid_argument&) {
    return false;
  }
}

void PairSession::begin(Variant v, const std::vector<std::size_t>& order) {
  if (!is_consistent_order(order)) {
    std::string text;
    for (auto i : order) text += (text.empty() ? "" : ",") + std::to_string(i + 1);
    throw std::invalid_argument("linkage order (" + text + ") is not consistent with the linkage tree");
  }
  coordination_ = PassCounter{options_.cost_model};
  finalization_ = PassCounter{options_.cost_model};
  payload_ = 0;
  report_ = CostReport{};
  report_.variant = to_string(v);
  report_.order = order;
}

CostReport PairSession::finish() {
  report_.coordination_passes = coordination_.passes;
  report_.finalization_passes = finalization_.passes;
  report_.payload_entries = payload_;
  report_.weighted_cost = coordination_.weighted;
  return report_;
}

CostReport PairSession::update_belief(const std::vector<std::size_t>& order) {
  begin(Variant::UB1, order);
  for (std::size_t k = 0; k < order.size(); ++k) {
    absorb_through_linkage(order[k]);
    auto* counter = k + 1 < order.size() ? &coordination_ : &finalization_;
    distribute_evidence(jt_a_, linkages_.linkages[order[k]].host_a, counter);
  }
  return finish();
}

CostReport PairSession::update_belief2(const std::vector<std::size_t>& order) {
  begin(Variant::UB2, order);
  for (std::size_t k = 0; k < order.size(); ++k) {
    absorb_through_linkage(order[k]);
    const auto root = linkages_.linkages[order[k]].host_a;
    if (k + 1 < order.size())
      distribute_on_subtree(jt_a_, root, host_.cliques, &coordination_);
    else
      distribute_evidence(jt_a_, root, &finalization_);
  }
  return finish();
}

CostReport PairSession::update_belief3(const std::vector<std::size_t>& order) {
  begin(Variant::UB3, order);
  for (std::size_t k = 0; k < order.size(); ++k) {
    absorb_through_linkage(order[k]);
    const auto here = linkages_.linkages[order[k]].host_a;
    if (k + 1 < order.size()) {
      // The host tree is a subtree, so the tree path stays inside it.
      const auto next = linkages_.linkages[order[k + 1]].host_a;
      distribute_on_chain(jt_a_, jt_a_.path(here, next), &coordination_);
    } else {
      distribute_evidence(jt_a_, here, &finalization_);
    }
  }
  return finish();
}

CostReport PairSession::run(Variant v, const std::vector<std::size_t>& order) {
  switch (v) {
    case Variant::UB1: return update_belief(order);
    case Variant::UB2: return update_belief2(order);
    case Variant::UB3: return update_belief3(order);
  }
  throw std::invalid_argument("unknown variant");
}

std::vector<std::size_t> PairSession::optimal_linkage_order(CostModel model) const {
  const std::size_t m = linkages_.size();
  if (m == 1) return {0};
  std::vector<std::size_t> hosts;
  for (const auto& l : linkages_.linkages) hosts.push_back(l.host_a);
  const WeightedTree tree = reduce_to_host_tree(jt_a_, host_, hosts, model);
  const TourResult tour = min_weight_open_tour(tree);

  std::vector<std::size_t> node_of(m);
  for (std::size_t i = 0; i < m; ++i) node_of[i] = tree.index_of(jt_a_.id(linkages_.linkages[i].host_a));
  auto linkages_in_visit_order = [&](const std::vector<std::size_t>& walk) {
    std::vector<std::size_t> visit;
    std::vector<bool> seen(tree.size(), false);
    for (auto node : walk) {
      if (seen[node]) continue;
      seen[node] = true;
      for (std::size_t i = 0; i < m; ++i)
        if (node_of[i] == node) visit.push_back(i);
    }
    return visit;
  };
  const auto distance = path_weights(tree);
  auto chain_cost = [&](const std::vector<std::size_t>& order) {
    double cost = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) cost += distance[node_of[order[k - 1]]][node_of[order[k]]];
    return cost;
  };

  // The tour read in either direction has the same weight; with retained
  // non-host junctions only one direction may respect the linkage tree.
  const auto forward = linkages_in_visit_order(tour.tour.walk);
  const auto backward = linkages_in_visit_order({tour.tour.walk.rbegin(), tour.tour.walk.rend()});
  std::optional<std::vector<std::size_t>> best;
  for (const auto* candidate : {&forward, &backward})
    if (is_consistent_order(*candidate) && (!best || chain_cost(*candidate) < chain_cost(*best))) best = *candidate;
  if (best) return *best;

  // Neither direction is consistent: defer each linkage until it becomes
  // adjacent to the ones already taken.
  std::vector<std::size_t> order;
  std::vector<bool> taken(m, false);
  while (order.size() < m) {
    for (auto i : forward) {
      if (taken[i]) continue;
      bool ok = order.empty();
      for (auto j : order)
        if (linkages_.adjacent(i, j)) ok = true;
      if (ok) {
        taken[i] = true;
        order.push_back(i);
        break;
      }
    }
  }
  return order;
}

PotentialTable PairSession::expected_posterior() const {
  const auto joint_a = joint_table(initial_a_, options_.oracle_limit);
  const auto joint_b = joint_table(jt_b_, options_.oracle_limit);
  const auto peer = marginalize(joint_b, dsepset_);
  const auto local = marginalize(joint_a, dsepset_);
  return normalize(multiply(joint_a, divide(peer, local)));
}

double PairSession::max_deviation() const {
  return max_abs_diff(normalize(joint_table(jt_a_, options_.oracle_limit)), expected_posterior());
}

std::vector<PotentialTable> PairSession::dsepset_marginals() const {
  std::vector<PotentialTable> out;
  for (const auto& v : dsepset_.vars()) {
    for (std::size_t c = 0; c < jt_a_.size(); ++c) {
      if (!jt_a_.clique(c).vars.contains(v.id)) continue;
      out.push_back(normalize(marginalize(jt_a_.belief(c), Scope{v})));
      break;
    }
  }
  return out;
}

}  // namespace msbn
