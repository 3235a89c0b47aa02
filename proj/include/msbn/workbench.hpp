#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "msbn/junction_tree.hpp"
#include "msbn/linkage.hpp"
#include "msbn/potential.hpp"
#include "msbn/tour.hpp"

namespace msbn {

struct PairData {
  JunctionTree jt_a;
  JunctionTree jt_b;
  Scope dsepset;
};

// ---------------------------------------------------------------------------
// File formats (JSON text). Serialization is canonical: variables sorted by
// id, cliques and nodes in natural id order, shortest round-trip numbers.

/// Throws ParseError (malformed text, with position) or ValidationError
/// (well-formed but invalid content, naming the offending field).
PairData parse_pair(const std::string& text);
std::string serialize_pair(const PairData& pair);
PairData load_pair(const std::filesystem::path& path);
void save_pair(const std::filesystem::path& path, const PairData& pair);

WeightedTree parse_tree(const std::string& text);
std::string serialize_tree(const WeightedTree& tree);
WeightedTree load_tree(const std::filesystem::path& path);
void save_tree(const std::filesystem::path& path, const WeightedTree& tree);

// ---------------------------------------------------------------------------
// Deterministic randomness

/// Seeded generator whose derived draws do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  /// Uniform integer in [lo, hi].
  long between(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::size_t>(hi - lo + 1))); }

 private:
  std::mt19937_64 engine_;
};

/// Uniform random labelled tree on nodes v1..vn from a random Prüfer
/// sequence, integer weights in [min_weight, max_weight]. Throws
/// std::invalid_argument for n < 2 or an empty weight range.
WeightedTree gen_tree(std::size_t n, std::uint64_t seed, long min_weight = 1, long max_weight = 9);

/// Random pair of junction trees sharing `n_shared` binary d-sepset
/// variables split over 1..min(max_linkages, n_shared) linkages. Private
/// variables of each side are either folded into a linkage clique, hung
/// off as extra non-host leaf cliques, or (T^a only) used to build a
/// non-host bridge clique inside the host tree. Always opens cleanly.
/// Throws std::invalid_argument when n_shared is 0 or either side's joint
/// would exceed `oracle_limit` cells.
PairData gen_pair(std::size_t n_shared, std::size_t n_private_a, std::size_t n_private_b, std::uint64_t seed,
                  std::size_t max_linkages = 4, std::size_t oracle_limit = kDefaultOracleLimit);

/// Uniformly grows a consistent linkage order from a random start.
std::vector<std::size_t> random_consistent_order(const LinkageTree& lt, Rng& rng);

// ---------------------------------------------------------------------------
// Built-in fixtures

WeightedTree fig4_tree();
WeightedTree fig5_tree();
/// Ten-node weighted tree named C1..C10.
WeightedTree fig6_tree();
/// The fig6 tree renamed v1..v10 so that the leaves are v1..v5.
WeightedTree fig7_tree();

/// Five-clique star-plus-tail T^a where linkage i is hosted at clique Ci.
PairData fig4_pair(std::uint64_t seed = 4);
/// T^a = {A,B,C}-{C,D,E}, T^b = {B,C,F}-{C,D,G}, I = {B,C,D}.
PairData pair2l(std::uint64_t seed = 0);
/// Ten binary d-sepset variables carried by three five-variable linkages.
PairData payload10(std::uint64_t seed = 10);

std::vector<std::string> fixture_names();
/// Serialized fixture text. Throws std::invalid_argument for an unknown name.
std::string export_fixture(const std::string& name);

// ---------------------------------------------------------------------------
// CLI

/// Runs the command line tool. Exit codes: 0 ok, 1 usage or input error,
/// 2 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msbn
