#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "msbn/junction_tree.hpp"
#include "msbn/potential.hpp"

namespace msbn {

/// Minimal subtree of a junction tree containing the d-sepset. Holds clique
/// indices of the source tree in ascending order.
struct HostTree {
  std::vector<std::size_t> cliques;
  std::vector<Edge> edges;

  bool contains(std::size_t clique) const;
};

struct Linkage {
  Scope vars;
  std::size_t host_a = 0;
  std::optional<std::size_t> host_b;
  // Host-tree cliques folded into this linkage, including its own.
  std::vector<std::size_t> members;
};

/// Linkages are indexed L1..Lm by ascending host_a id; `indexing` is the
/// construction order (smallest index first, each next linkage the smallest
/// one adjacent to those already taken), which is always consistent.
struct LinkageTree {
  std::vector<Linkage> linkages;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> indexing;

  std::size_t size() const { return linkages.size(); }
  bool adjacent(std::size_t i, std::size_t j) const;
};

/// Repeatedly removes the smallest-id leaf clique C with C∩I empty or with
/// C∩I contained in another remaining clique. Throws ValidationError when
/// some d-sepset variable does not occur in the tree.
HostTree build_host_tree(const JunctionTree& jt, const Scope& dsepset);

/// Drops non-d-sepset variables private to one host clique, then folds any
/// clique that became a subset of a neighbour into the smallest-id such
/// neighbour, until neither rule applies.
LinkageTree build_linkage_tree(const JunctionTree& jt, const HostTree& host, const Scope& dsepset);

/// True iff the linkage scopes cover exactly the d-sepset.
bool validate_linkage_cover(const LinkageTree& lt, const Scope& dsepset);

/// Picks, per linkage, the smallest-state-space clique of `jt_b` that
/// contains it (ties by smallest id). Throws ValidationError when a linkage
/// has no host in jt_b.
void assign_hosts(LinkageTree& lt, const JunctionTree& jt_b);

std::size_t payload_entries(const LinkageTree& lt);
std::size_t direct_payload_entries(const Scope& dsepset);

}  // namespace msbn
