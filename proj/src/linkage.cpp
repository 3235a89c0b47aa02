#include "msbn/linkage.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "msbn/error.hpp"

namespace msbn {

bool HostTree::contains(std::size_t clique) const {
  return std::binary_search(cliques.begin(), cliques.end(), clique);
}

bool LinkageTree::adjacent(std::size_t i, std::size_t j) const {
  for (auto [a, b] : edges)
    if ((a == i && b == j) || (a == j && b == i)) return true;
  return false;
}

HostTree build_host_tree(const JunctionTree& jt, const Scope& dsepset) {
  if (dsepset.empty()) throw ValidationError("d-sepset is empty");
  const Scope present = jt.variables();
  for (const auto& v : dsepset.vars())
    if (!present.contains(v.id)) throw ValidationError("d-sepset variable '" + v.id + "' does not occur in the junction tree");

  const std::size_t n = jt.size();
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = jt.neighbors(i).size();
  std::size_t remaining = n;

  bool removed = true;
  while (removed && remaining > 1) {
    removed = false;
    for (std::size_t c = 0; c < n && !removed; ++c) {
      if (!alive[c] || degree[c] != 1) continue;
      const Scope part = jt.clique(c).vars.intersect(dsepset);
      bool removable = part.empty();
      for (std::size_t d = 0; d < n && !removable; ++d)
        if (d != c && alive[d] && part.is_subset_of(jt.clique(d).vars)) removable = true;
      if (!removable) continue;
      alive[c] = false;
      --remaining;
      for (auto nb : jt.neighbors(c))
        if (alive[nb]) --degree[nb];
      removed = true;
    }
  }

  HostTree h;
  for (std::size_t i = 0; i < n; ++i)
    if (alive[i]) h.cliques.push_back(i);
  for (const auto& e : jt.edges())
    if (alive[e.a] && alive[e.b]) h.edges.push_back(e);
  return h;
}

LinkageTree build_linkage_tree(const JunctionTree& jt, const HostTree& host, const Scope& dsepset) {
  const std::size_t n = jt.size();
  std::vector<bool> alive(n, false);
  std::vector<Scope> scope(n);
  std::vector<std::set<std::size_t>> adj(n);
  std::vector<std::vector<std::size_t>> members(n);
  for (auto c : host.cliques) {
    alive[c] = true;
    scope[c] = jt.clique(c).vars;
    members[c] = {c};
  }
  for (const auto& e : host.edges) {
    adj[e.a].insert(e.b);
    adj[e.b].insert(e.a);
  }

  for (bool changed = true; changed;) {
    changed = false;
    // Rule 1: a non-d-sepset variable held by a single clique is summed out.
    std::map<std::string, std::size_t> holders;
    for (std::size_t c = 0; c < n; ++c)
      if (alive[c])
        for (const auto& v : scope[c].vars()) ++holders[v.id];
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      std::vector<Variable> kept;
      for (const auto& v : scope[c].vars())
        if (dsepset.contains(v.id) || holders[v.id] > 1) kept.push_back(v);
      if (kept.size() != scope[c].size()) {
        scope[c] = Scope(std::move(kept));
        changed = true;
      }
    }
    // Rule 2: fold one clique that became a subset of a neighbour.
    for (std::size_t c = 0; c < n && !changed; ++c) {
      if (!alive[c]) continue;
      for (auto d : adj[c]) {
        if (!scope[c].is_subset_of(scope[d])) continue;
        alive[c] = false;
        for (auto other : adj[c]) {
          adj[other].erase(c);
          if (other != d) {
            adj[other].insert(d);
            adj[d].insert(other);
          }
        }
        adj[c].clear();
        members[d].insert(members[d].end(), members[c].begin(), members[c].end());
        changed = true;
        break;
      }
    }
  }

  // Each surviving node is one linkage; its host is the member clique that
  // contains the reduced scope with the smallest state space.
  std::vector<std::size_t> survivors;
  for (std::size_t c = 0; c < n; ++c)
    if (alive[c]) survivors.push_back(c);

  LinkageTree lt;
  std::vector<std::size_t> host_of(survivors.size());
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    const auto c = survivors[k];
    std::size_t best = c;
    for (auto m : members[c]) {
      if (!scope[c].is_subset_of(jt.clique(m).vars)) continue;
      const auto sm = jt.clique(m).vars.state_space();
      const auto sb = jt.clique(best).vars.state_space();
      if (sm < sb || (sm == sb && m < best)) best = m;
    }
    host_of[k] = best;
  }
  std::vector<std::size_t> order(survivors.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return host_of[x] < host_of[y]; });

  std::vector<std::size_t> linkage_of(n, n);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto c = survivors[order[i]];
    Linkage l;
    l.vars = scope[c];
    l.host_a = host_of[order[i]];
    l.members = members[c];
    std::sort(l.members.begin(), l.members.end());
    lt.linkages.push_back(std::move(l));
    linkage_of[c] = i;
  }
  for (auto c : survivors)
    for (auto d : adj[c])
      if (c < d) {
        auto a = linkage_of[c], b = linkage_of[d];
        lt.edges.emplace_back(std::min(a, b), std::max(a, b));
      }
  std::sort(lt.edges.begin(), lt.edges.end());

  // Construction order.
  if (!lt.linkages.empty()) {
    std::vector<bool> taken(lt.size(), false);
    lt.indexing.push_back(0);
    taken[0] = true;
    while (lt.indexing.size() < lt.size()) {
      std::size_t next = lt.size();
      for (auto [a, b] : lt.edges) {
        if (taken[a] && !taken[b]) next = std::min(next, b);
        if (taken[b] && !taken[a]) next = std::min(next, a);
      }
      if (next == lt.size()) break;  // disconnected; cannot happen for a host tree
      taken[next] = true;
      lt.indexing.push_back(next);
    }
  }
  return lt;
}

bool validate_linkage_cover(const LinkageTree& lt, const Scope& dsepset) {
  Scope covered;
  for (const auto& l : lt.linkages) {
    try {
      covered = covered.unite(l.vars);
    } catch (const std::invalid_argument&) {
      return false;
    }
  }
  return covered == dsepset;
}

void assign_hosts(LinkageTree& lt, const JunctionTree& jt_b) {
  for (std::size_t i = 0; i < lt.size(); ++i) {
    auto& l = lt.linkages[i];
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < jt_b.size(); ++c) {
      if (!l.vars.is_subset_of(jt_b.clique(c).vars)) continue;
      if (!best || jt_b.clique(c).vars.state_space() < jt_b.clique(*best).vars.state_space()) best = c;
    }
    if (!best)
      throw ValidationError("peer cannot host linkage L" + std::to_string(i + 1) + " " + l.vars.to_string());
    l.host_b = best;
  }
}

std::size_t payload_entries(const LinkageTree& lt) {
  std::size_t total = 0;
  for (const auto& l : lt.linkages) total += l.vars.state_space();
  return total;
}

std::size_t direct_payload_entries(const Scope& dsepset) { return dsepset.state_space(); }

}  // namespace msbn
