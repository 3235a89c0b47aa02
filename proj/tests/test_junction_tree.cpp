#include "doctest.h"
#include "msbn/error.hpp"
#include "support.hpp"

using namespace msbn;
using testing::random_chain_jt;
using testing::random_table;
using testing::scope_of;

namespace {

JunctionTree two_cliques() {
  JunctionTree jt({{"C1", scope_of({"A", "B"})}, {"C2", scope_of({"B", "C"})}}, {{"C1", "C2"}});
  jt.set_belief(0, PotentialTable(scope_of({"A", "B"}), {0.1, 0.2, 0.3, 0.4}));
  jt.set_belief(1, PotentialTable(scope_of({"B", "C"}), {0.5, 0.5, 0.9, 0.1}));
  return jt;
}

PotentialTable normalized_joint(const JunctionTree& jt) { return normalize(joint_table(jt)); }

// Random junction trees with richer shapes than chains.
std::vector<JunctionTree> random_trees(std::size_t count, std::uint64_t seed) {
  std::vector<JunctionTree> out;
  for (std::uint64_t s = 0; s < count; ++s) {
    Rng rng(seed + s);
    auto pair = gen_pair(1 + rng.below(5), rng.below(3), rng.below(3), seed + s);
    out.push_back(std::move(pair.jt_a));
    out.push_back(std::move(pair.jt_b));
  }
  return out;
}

}  // namespace

TEST_CASE("construction orders cliques naturally and rejects malformed input") {
  JunctionTree jt({{"C10", scope_of({"A"})}, {"C2", scope_of({"A", "B"})}}, {{"C10", "C2"}});
  CHECK(jt.id(0) == "C2");
  CHECK(jt.id(1) == "C10");
  CHECK(jt.sepset_scope(0) == scope_of({"A"}));
  CHECK_THROWS_AS(JunctionTree({{"C1", scope_of({"A"})}, {"C1", scope_of({"B"})}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionTree({{"C1", Scope{}}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionTree({{"C1", scope_of({"A"})}}, {{"C1", "C9"}}), std::invalid_argument);
  CHECK_THROWS_AS(JunctionTree({{"C1", scope_of({"A"})}}, {{"C1", "C1"}}), std::invalid_argument);
  CHECK_THROWS_AS(jt.set_belief(0, PotentialTable::ones(scope_of({"A"}))), std::invalid_argument);
}

TEST_CASE("validate_jt reports structural violations") {
  CHECK(validate_jt(two_cliques()).valid);

  const JunctionTree cycle({{"C1", scope_of({"A", "B"})}, {"C2", scope_of({"B", "C"})}, {"C3", scope_of({"A", "C"})}},
                           {{"C1", "C2"}, {"C2", "C3"}, {"C1", "C3"}});
  const auto r1 = validate_jt(cycle);
  CHECK_FALSE(r1.valid);
  CHECK(r1.violations.front().find("cycle") != std::string::npos);

  const JunctionTree split({{"C1", scope_of({"A"})}, {"C2", scope_of({"B"})}}, {});
  CHECK(validate_jt(split).violations.front().find("disconnected") != std::string::npos);

  JunctionTree rip({{"C1", scope_of({"A", "B"})}, {"C2", scope_of({"B", "C"})}, {"C3", scope_of({"A", "C"})}},
                         {{"C1", "C2"}, {"C2", "C3"}});
  const auto r3 = validate_jt(rip);
  CHECK_FALSE(r3.valid);
  CHECK(r3.violations.front().find("running intersection") != std::string::npos);
  CHECK_THROWS_AS(calibrate(rip), ValidationError);
}

TEST_CASE("single pass on two cliques") {
  auto jt = two_cliques();
  PassCounter counter;
  pass_message(jt, 0, 1, &counter);
  CHECK(counter.passes == 1);
  // marg of C1 onto B = (0.4, 0.6); C2 rows scale by it
  CHECK(jt.sepset_belief(0)[0] == doctest::Approx(0.4));
  CHECK(jt.belief(1)[0] == doctest::Approx(0.2));
  CHECK(jt.belief(1)[3] == doctest::Approx(0.06));
  CHECK_THROWS_AS(pass_message(jt, 0, 0), std::invalid_argument);
}

TEST_CASE("calibrated two-clique tree agrees on the separator") {
  auto jt = two_cliques();
  calibrate(jt);
  const auto report = consistency_check(jt, 1e-12);
  CHECK(report.consistent);
  CHECK(report.max_discrepancy <= 1e-12);
  const auto b1 = marginalize(jt.belief(0), scope_of({"B"}));
  const auto b2 = marginalize(jt.belief(1), scope_of({"B"}));
  CHECK(table_equal(b1, b2, 1e-12));
}

TEST_CASE("uncalibrated tree is reported inconsistent with the worst edge") {
  const auto report = consistency_check(two_cliques(), 1e-9);
  CHECK_FALSE(report.consistent);
  REQUIRE(report.worst_edge.has_value());
  CHECK(*report.worst_edge == 0);
  CHECK(report.max_discrepancy > 0.1);
}

TEST_CASE("subtree and chain distribution validate their arguments") {
  Rng rng(5);
  auto jt = random_chain_jt(4, rng);
  CHECK_THROWS_AS(distribute_on_subtree(jt, 0, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(distribute_on_subtree(jt, 3, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(distribute_on_chain(jt, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(distribute_on_chain(jt, {0, 1, 0}), std::invalid_argument);
  PassCounter c;
  distribute_on_chain(jt, {2}, &c);
  CHECK(c.passes == 0);
}

TEST_CASE("statespace pass weight is receiver plus sepset") {
  auto jt = two_cliques();
  PassCounter c{CostModel::StateSpace};
  pass_message(jt, 0, 1, &c);
  CHECK(c.weighted == 6);
  CHECK(parse_cost_model("statespace") == CostModel::StateSpace);
  CHECK_THROWS_AS(parse_cost_model("bogus"), std::invalid_argument);
}

TEST_CASE("joint oracle respects its cell limit") {
  Rng rng(6);
  const auto jt = random_chain_jt(6, rng);
  CHECK(joint_table(jt).size() == 128);
  CHECK_THROWS_AS(joint_table(jt, 64), OracleLimitExceeded);
}

TEST_CASE("property: message passing preserves the normalized joint") {
  for (auto& jt : random_trees(40, 700)) {
    const auto before = normalized_joint(jt);
    for (const auto& e : jt.edges()) {
      pass_message(jt, e.a, e.b);
      CHECK(table_equal(normalized_joint(jt), before, 1e-9));
      pass_message(jt, e.b, e.a);
    }
    calibrate(jt);
    CHECK(table_equal(normalized_joint(jt), before, 1e-9));
  }
}

TEST_CASE("property: calibration makes random trees consistent") {
  for (auto& jt : random_trees(60, 900)) {
    calibrate(jt);
    CHECK(consistency_check(jt, 1e-9).consistent);
  }
}

TEST_CASE("property: distribution from any root is a fixed point of a calibrated tree") {
  for (auto& jt : random_trees(40, 1100)) {
    calibrate(jt);
    for (std::size_t root = 0; root < jt.size(); ++root) {
      auto copy = jt;
      distribute_evidence(copy, root);
      for (std::size_t c = 0; c < jt.size(); ++c) CHECK(max_abs_diff(copy.belief(c), jt.belief(c)) <= 1e-12);
    }
  }
}

TEST_CASE("property: pass counts match the traversed structure") {
  for (auto& jt : random_trees(40, 1300)) {
    PassCounter full;
    distribute_evidence(jt, jt.size() - 1, &full);
    CHECK(full.passes == jt.size() - 1);

    // subtree = root plus its neighbours
    std::vector<std::size_t> allowed{0};
    for (auto n : jt.neighbors(0)) allowed.push_back(n);
    PassCounter sub;
    distribute_on_subtree(jt, 0, allowed, &sub);
    CHECK(sub.passes == allowed.size() - 1);

    const auto path = jt.path(0, jt.size() - 1);
    PassCounter chain;
    distribute_on_chain(jt, path, &chain);
    CHECK(chain.passes == path.size() - 1);
  }
}

TEST_CASE("fig4 tree pass counts") {
  auto jt = fig4_pair().jt_a;
  PassCounter full;
  distribute_evidence(jt, jt.index_of("C3"), &full);
  CHECK(full.passes == 4);
  PassCounter chain;
  distribute_on_chain(jt, {jt.index_of("C2"), jt.index_of("C1"), jt.index_of("C3")}, &chain);
  CHECK(chain.passes == 2);
  PassCounter none;
  distribute_on_subtree(jt, 0, {0}, &none);
  CHECK(none.passes == 0);
}

TEST_CASE("clique marginals of the joint match calibrated beliefs") {
  Rng rng(8);
  auto jt = random_chain_jt(5, rng);
  calibrate(jt);
  const auto joint = joint_table(jt);
  for (std::size_t c = 0; c < jt.size(); ++c)
    CHECK(table_equal(normalize(marginalize(joint, jt.clique(c).vars)), normalize(jt.belief(c)), 1e-9));
  auto again = jt;
  calibrate(again);
  for (std::size_t c = 0; c < jt.size(); ++c) CHECK(max_abs_diff(again.belief(c), jt.belief(c)) <= 1e-12);
}

TEST_CASE("perturbed clique is blamed on an adjacent edge") {
  Rng rng(9);
  auto jt = random_chain_jt(4, rng);
  calibrate(jt);
  auto t = normalize(jt.belief(3));
  std::vector<double> v(t.values().begin(), t.values().end());
  v[0] += 0.1;
  jt.set_belief(3, PotentialTable(t.scope(), v));
  const auto report = consistency_check(jt, 1e-9);
  CHECK_FALSE(report.consistent);
  REQUIRE(report.worst_edge.has_value());
  const auto& e = jt.edges()[*report.worst_edge];
  CHECK((e.a == 3 || e.b == 3));

  const JunctionTree single({{"C1", scope_of({"A"})}}, {});
  const auto r = consistency_check(single, 1e-9);
  CHECK(r.consistent);
  CHECK(r.max_discrepancy == 0);
}

TEST_CASE("uniform beliefs stay uniform and repeated messages are no-ops") {
  auto jt = pair2l().jt_a;
  for (std::size_t c = 0; c < jt.size(); ++c) jt.set_belief(c, PotentialTable::ones(jt.clique(c).vars));
  calibrate(jt);
  for (std::size_t c = 0; c < jt.size(); ++c) {
    const auto t = normalize(jt.belief(c));
    for (double v : t.values()) CHECK(v == doctest::Approx(1.0 / 8));
  }

  Rng rng(10);
  auto chain = random_chain_jt(2, rng);
  pass_message(chain, 0, 1);
  const auto once = chain.belief(1);
  pass_message(chain, 0, 1);
  CHECK(max_abs_diff(once, chain.belief(1)) <= 1e-12);
}
