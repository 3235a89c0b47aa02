#include <algorithm>
#include <climits>
#include "doctest.h"
#include "msbn/error.hpp"
#include "msbn/propagation.hpp"
#include "support.hpp"

using namespace msbn;
using testing::scope_of;

namespace {

PairSession open_pair(PairData p, CostModel model = CostModel::Unit) {
  return PairSession::open(std::move(p.jt_a), std::move(p.jt_b), std::move(p.dsepset), SessionOptions{model});
}

std::vector<std::size_t> zero_based(std::initializer_list<std::size_t> one_based) {
  std::vector<std::size_t> out;
  for (auto i : one_based) out.push_back(i - 1);
  return out;
}

bool same_tables(const JunctionTree& x, const JunctionTree& y) {
  for (std::size_t c = 0; c < x.size(); ++c)
    if (!(x.belief(c) == y.belief(c))) return false;
  return true;
}

PairData small_pair(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t shared = 1 + rng.below(6);
  const std::size_t pa = rng.below(std::min<std::size_t>(10 - shared, 3) + 1);
  const std::size_t pb = rng.below(std::min<std::size_t>(10 - shared - pa, 3) + 1);
  return gen_pair(shared, pa, pb, seed);
}

}  // namespace

TEST_CASE("opening sessions") {
  const auto s = open_pair(pair2l());
  REQUIRE(s.linkage_count() == 2);
  CHECK(s.linkage_tree().linkages[0].vars.ids() == std::vector<std::string>{"B", "C"});
  CHECK(s.linkage_tree().linkages[1].vars.ids() == std::vector<std::string>{"C", "D"});
  CHECK(consistency_check(s.tree_a(), 1e-12).consistent);
  CHECK(consistency_check(s.tree_b(), 1e-12).consistent);

  auto p = pair2l();
  CHECK_THROWS_AS(PairSession::open(p.jt_a, p.jt_b, scope_of({"B", "C", "E"})), ValidationError);

  const JunctionTree a({{"C1", scope_of({"A", "B"})}}, {});
  const JunctionTree b({{"D1", scope_of({"A", "B"})}}, {});
  const auto single = PairSession::open(a, b, scope_of({"A", "B"}));
  CHECK(single.linkage_count() == 1);
  CHECK(single.optimal_linkage_order() == std::vector<std::size_t>{0});
}

TEST_CASE("absorbing through a linkage") {
  auto s = open_pair(pair2l());
  s.absorb_through_linkage(0);
  CHECK(s.cost_report().payload_entries == 0);
  const auto report = s.update_belief({0, 1});
  CHECK(report.payload_entries == 8);

  // identical sides: nothing moves
  const JunctionTree a({{"C1", scope_of({"A", "B"})}}, {});
  JunctionTree b({{"D1", scope_of({"A", "B"})}}, {});
  auto same = PairSession::open(a, a, scope_of({"A", "B"}));
  const auto before = same.tree_a().belief(0);
  same.absorb_through_linkage(0);
  CHECK(max_abs_diff(before, same.tree_a().belief(0)) <= 1e-12);

  // evidence in the peer zeroing one configuration removes its mass
  b.set_belief(0, PotentialTable(scope_of({"A", "B"}), {0.3, 0.0, 0.2, 0.5}));
  auto ev = PairSession::open(a, b, scope_of({"A", "B"}));
  ev.update_belief3({0});
  CHECK(ev.expected_posterior()[1] == 0);
  CHECK(ev.max_deviation() <= 1e-12);
}

TEST_CASE("fig4 coordination counts") {
  const auto base = open_pair(fig4_pair());
  auto run = [&](Variant v, std::vector<std::size_t> order) {
    auto s = base;
    return s.run(v, order);
  };
  const auto ub1 = run(Variant::UB1, zero_based({1, 2, 3, 4, 5}));
  const auto ub2 = run(Variant::UB2, zero_based({1, 2, 3, 4, 5}));
  CHECK(ub1.coordination_passes == 16);
  CHECK(ub2.coordination_passes == 16);
  CHECK(ub2.finalization_passes == 4);
  CHECK(run(Variant::UB2, zero_based({5, 2, 1, 3, 4})).coordination_passes == 16);
  CHECK(run(Variant::UB3, zero_based({1, 2, 3, 4, 5})).coordination_passes == 8);
  CHECK(run(Variant::UB3, zero_based({5, 2, 1, 3, 4})).coordination_passes == 5);
  const auto optimal = base.optimal_linkage_order();
  CHECK(base.is_consistent_order(optimal));
  const auto best = run(Variant::UB3, optimal);
  CHECK(best.coordination_passes == 5);
  CHECK(best.payload_entries == ub1.payload_entries);
}

TEST_CASE("orders are checked") {
  auto s = open_pair(fig4_pair());
  CHECK_FALSE(s.is_consistent_order(zero_based({3, 4, 1, 2, 5})));
  CHECK_THROWS_AS(s.update_belief3(zero_based({3, 4, 1, 2, 5})), std::invalid_argument);
  CHECK_THROWS_AS(s.update_belief(zero_based({1, 2})), std::invalid_argument);
  CHECK(parse_variant("ub2") == Variant::UB2);
  CHECK_THROWS_AS(parse_variant("ub4"), std::invalid_argument);
}

TEST_CASE("single linkage: all variants coincide") {
  JunctionTree a({{"C1", scope_of({"A", "B"})}, {"C2", scope_of({"B", "C"})}}, {{"C1", "C2"}});
  JunctionTree b({{"D1", scope_of({"B", "D"})}}, {});
  Rng rng(3);
  for (std::size_t c = 0; c < a.size(); ++c) a.set_belief(c, testing::random_table(a.clique(c).vars, rng));
  b.set_belief(0, testing::random_table(b.clique(0).vars, rng));
  const auto base = PairSession::open(a, b, scope_of({"B"}));
  std::vector<CostReport> reports;
  std::vector<JunctionTree> results;
  for (auto v : {Variant::UB1, Variant::UB2, Variant::UB3}) {
    auto s = base;
    reports.push_back(s.run(v, {0}));
    results.push_back(s.tree_a());
    CHECK(s.max_deviation() <= 1e-9);
  }
  for (std::size_t k = 1; k < 3; ++k) {
    CHECK(reports[k].coordination_passes == reports[0].coordination_passes);
    CHECK(reports[k].finalization_passes == reports[0].finalization_passes);
    CHECK(same_tables(results[k], results[0]));
  }
}

TEST_CASE("posterior oracle on the two-linkage fixture") {
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto base = open_pair(pair2l(seed));
    for (auto v : {Variant::UB1, Variant::UB2, Variant::UB3}) {
      auto s = base;
      s.run(v, s.default_order());
      CHECK(s.max_deviation() <= 1e-9);
    }
  }
  // peer already agrees: the posterior is the prior
  const auto p = pair2l();
  const auto agree = PairSession::open(p.jt_a, p.jt_a, p.dsepset);
  CHECK(table_equal(agree.expected_posterior(), normalize(joint_table(agree.tree_a())), 1e-12));
}

TEST_CASE("statespace model weighs coordination passes") {
  const auto base = open_pair(fig4_pair(), CostModel::StateSpace);
  auto s = base;
  const auto r = s.update_belief3(base.optimal_linkage_order());
  CHECK(r.weighted_cost > r.coordination_passes);
  CHECK(base.is_consistent_order(base.optimal_linkage_order()));
}

TEST_CASE("property: variants agree with the oracle and leave the peer alone") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto base = open_pair(small_pair(seed));
    Rng rng(seed);
    const auto order = random_consistent_order(base.linkage_tree(), rng);
    REQUIRE(base.is_consistent_order(order));
    std::vector<PotentialTable> joints;
    for (auto v : {Variant::UB1, Variant::UB2, Variant::UB3}) {
      auto s = base;
      s.run(v, order);
      CHECK(s.max_deviation() <= 1e-9);
      CHECK(consistency_check(s.tree_a(), 1e-9).consistent);
      CHECK(same_tables(s.tree_b(), base.tree_b()));
      joints.push_back(normalize(joint_table(s.tree_a())));
    }
    CHECK(table_equal(joints[0], joints[1], 1e-9));
    CHECK(table_equal(joints[0], joints[2], 1e-9));
  }
}

TEST_CASE("property: optimal orders are consistent and dominate") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto base = open_pair(gen_pair(2 + seed % 9, seed % 4, seed % 3, 300 + seed, 4));
    const auto optimal = base.optimal_linkage_order();
    CHECK(base.is_consistent_order(optimal));
    auto s = base;
    const auto best = s.update_belief3(optimal).coordination_passes;
    Rng rng(seed);
    for (int k = 0; k < 4; ++k) {
      const auto order = random_consistent_order(base.linkage_tree(), rng);
      auto a = base, b = base, c = base;
      const auto ub3 = a.update_belief3(order).coordination_passes;
      const auto ub2 = b.update_belief2(order).coordination_passes;
      const auto ub1 = c.update_belief(order).coordination_passes;
      CHECK(best <= ub3);
      CHECK(ub3 <= ub2);
      CHECK(ub2 <= ub1);
    }
  }
}

TEST_CASE("property: rerunning a variant is idempotent") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto base = open_pair(small_pair(500 + seed));
    for (auto v : {Variant::UB1, Variant::UB2, Variant::UB3}) {
      auto s = base;
      s.run(v, base.default_order());
      const auto first = s.tree_a();
      s.run(v, base.default_order());
      for (std::size_t c = 0; c < first.size(); ++c) CHECK(max_abs_diff(first.belief(c), s.tree_a().belief(c)) <= 1e-12);
    }
  }
}

TEST_CASE("optimal order around a non-host junction") {
  // C1 folds into C4, leaving a degree-3 non-host between the other hosts.
  JunctionTree a({{"C1", scope_of({"A", "B"})},
                  {"C2", scope_of({"A", "Y"})},
                  {"C3", scope_of({"B", "Z"})},
                  {"C4", scope_of({"A", "B", "X"})},
                  {"C5", scope_of({"W", "X"})}},
                 {{"C1", "C2"}, {"C1", "C3"}, {"C1", "C4"}, {"C4", "C5"}});
  // the peer's d-sepset marginal factorizes along the same linkage tree
  JunctionTree b({{"D1", scope_of({"A", "Y"})},
                  {"D2", scope_of({"B", "Z"})},
                  {"D3", scope_of({"A", "B", "X"})},
                  {"D4", scope_of({"W", "X"})}},
                 {{"D1", "D3"}, {"D2", "D3"}, {"D3", "D4"}});
  Rng rng(11);
  for (std::size_t c = 0; c < a.size(); ++c) a.set_belief(c, testing::random_table(a.clique(c).vars, rng));
  for (std::size_t c = 0; c < b.size(); ++c) b.set_belief(c, testing::random_table(b.clique(c).vars, rng));
  const auto base = PairSession::open(a, b, scope_of({"A", "B", "W", "X", "Y", "Z"}));
  REQUIRE(base.linkage_count() == 4);
  CHECK(base.host_tree().contains(0));
  for (const auto& l : base.linkage_tree().linkages) CHECK(l.host_a != 0);

  const auto order = base.optimal_linkage_order();
  CHECK(base.is_consistent_order(order));
  auto s = base;
  const auto best = s.update_belief3(order).coordination_passes;
  CHECK(s.max_deviation() <= 1e-9);

  std::vector<std::size_t> perm{0, 1, 2, 3};
  std::size_t exhaustive = SIZE_MAX;
  do {
    if (!base.is_consistent_order(perm)) continue;
    auto t = base;
    exhaustive = std::min(exhaustive, t.update_belief3(perm).coordination_passes);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(exhaustive == 5);
  CHECK(best == exhaustive);
}
