#pragma once

#include <string>
#include <vector>

#include "msbn/junction_tree.hpp"
#include "msbn/potential.hpp"
#include "msbn/workbench.hpp"

namespace testing {

inline msbn::Variable bin(const std::string& id) { return {id, 2}; }

inline msbn::Scope scope_of(const std::vector<std::string>& ids) {
  std::vector<msbn::Variable> vars;
  for (const auto& id : ids) vars.push_back(bin(id));
  return msbn::Scope(vars);
}

inline msbn::PotentialTable random_table(const msbn::Scope& scope, msbn::Rng& rng, double zero_share = 0.0) {
  std::vector<double> values(scope.state_space());
  for (auto& v : values) v = rng.uniform01() < zero_share ? 0.0 : rng.uniform(0.05, 2.0);
  return msbn::PotentialTable(scope, std::move(values));
}

// Random binary scope drawn from X0..X{pool-1}.
inline msbn::Scope random_scope(msbn::Rng& rng, std::size_t pool, std::size_t max_size) {
  const std::size_t k = 1 + rng.below(max_size);
  std::vector<std::string> ids;
  while (ids.size() < k) {
    std::string id = "X" + std::to_string(rng.below(pool));
    bool seen = false;
    for (const auto& s : ids) seen = seen || s == id;
    if (!seen) ids.push_back(id);
  }
  return scope_of(ids);
}

// Chain-structured junction tree C1{X0,X1}-C2{X1,X2}-... with random potentials.
inline msbn::JunctionTree random_chain_jt(std::size_t cliques, msbn::Rng& rng) {
  std::vector<msbn::Clique> cs;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < cliques; ++i) {
    cs.push_back({"C" + std::to_string(i + 1), scope_of({"X" + std::to_string(i), "X" + std::to_string(i + 1)})});
    if (i) edges.emplace_back("C" + std::to_string(i), "C" + std::to_string(i + 1));
  }
  msbn::JunctionTree jt(cs, edges);
  for (std::size_t i = 0; i < jt.size(); ++i) jt.set_belief(i, random_table(jt.clique(i).vars, rng));
  return jt;
}

}  // namespace testing
