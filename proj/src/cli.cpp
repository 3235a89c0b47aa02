#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "msbn/error.hpp"
#include "msbn/propagation.hpp"
#include "msbn/workbench.hpp"

namespace msbn {

namespace {

using ordered_json = nlohmann::ordered_json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;

std::string fmt_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string join_ids(const std::vector<std::string>& ids, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? sep : "") + ids[i];
  return s;
}

std::string order_text(const std::vector<std::size_t>& order) {
  std::string s;
  for (std::size_t i = 0; i < order.size(); ++i) s += (i ? "," : "") + std::to_string(order[i] + 1);
  return s;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& order) {
  std::vector<std::size_t> out;
  for (auto i : order) out.push_back(i + 1);
  return out;
}

std::vector<std::size_t> parse_order(const std::string& text, const PairSession& s, Variant v) {
  if (text.empty()) return v == Variant::UB3 ? s.optimal_linkage_order() : s.default_order();
  if (text == "optimal") return s.optimal_linkage_order();
  if (text == "default") return s.default_order();
  std::vector<std::size_t> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || value == 0 || value > s.linkage_count())
      throw std::invalid_argument("bad linkage index '" + item + "' in --order");
    order.push_back(value - 1);
  }
  return order;
}

ordered_json report_json(const CostReport& r, std::optional<double> deviation) {
  ordered_json j;
  j["variant"] = r.variant;
  j["order"] = one_based(r.order);
  j["coordination_passes"] = r.coordination_passes;
  j["finalization_passes"] = r.finalization_passes;
  j["payload_entries"] = r.payload_entries;
  j["weighted_cost"] = r.weighted_cost;
  if (deviation)
    j["max_deviation"] = *deviation;
  else
    j["max_deviation"] = nullptr;
  return j;
}

std::optional<double> try_deviation(const PairSession& s) {
  try {
    return s.max_deviation();
  } catch (const OracleLimitExceeded&) {
    return std::nullopt;
  }
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write '" + path + "'");
  file << text;
}

// ---------------------------------------------------------------------------

int cmd_tour(const std::string& file, bool oracle, std::size_t brute_limit, const std::string& format,
             std::ostream& out) {
  const WeightedTree tree = load_tree(file);
  const OpenTour closed = closed_tour(tree);
  std::optional<ChainSearch> search;
  std::optional<TourResult> tour;
  if (tree.size() >= 2) {
    search = heaviest_terminal_chain(tree);
    tour = min_weight_open_tour(tree);
  }
  std::optional<NumberingWeight> brute;
  if (oracle) brute = brute_force_min_numbering(tree, brute_limit);
  const bool consistent = tour ? check_numbering_consistent(tree, tour->numbering) : true;
  const double weight = tour ? tour->tour.weight : 0.0;
  const bool match = !brute || brute->weight == weight;

  if (format == "json") {
    ordered_json j;
    j["nodes"] = tree.size();
    j["closed_weight"] = closed.weight;
    if (search) {
      j["leaves"] = tree.ids(search->distances.leaves);
      j["M"] = search->max_to_leaf;
      j["x"] = tree.id(search->distances.leaves[search->x]);
      j["y"] = tree.id(search->distances.leaves[search->y]);
      j["chain"] = tree.ids(tour->chain.path);
      j["chain_weight"] = tour->chain.weight;
      j["tour"] = tree.ids(tour->tour.walk);
      j["numbering"] = tree.ids(tour->numbering.order);
    }
    j["weight"] = weight;
    j["numbering_consistent"] = consistent;
    if (brute) {
      j["oracle_weight"] = brute->weight;
      j["oracle_match"] = match;
    }
    out << j.dump(2) << "\n";
  } else {
    out << "nodes: " << tree.size() << "\n";
    out << "closed tour weight: " << fmt_number(closed.weight) << "\n";
    if (search) {
      out << "leaves: " << join_ids(tree.ids(search->distances.leaves)) << "\n";
      out << "M:";
      for (double m : search->max_to_leaf) out << " " << fmt_number(m);
      out << "\n";
      out << "x: " << tree.id(search->distances.leaves[search->x])
          << "  y: " << tree.id(search->distances.leaves[search->y]) << "\n";
      out << "heaviest chain: " << join_ids(tree.ids(tour->chain.path)) << " (weight "
          << fmt_number(tour->chain.weight) << ")\n";
      out << "open tour: " << join_ids(tree.ids(tour->tour.walk)) << "\n";
      out << "numbering: " << join_ids(tree.ids(tour->numbering.order)) << "\n";
    }
    out << "weight: " << fmt_number(weight) << "\n";
    out << "numbering consistent: " << (consistent ? "yes" : "no") << "\n";
    if (brute)
      out << "oracle weight: " << fmt_number(brute->weight) << " (" << (match ? "match" : "MISMATCH") << ")\n";
  }
  return match && consistent ? kOk : kVerifyFailed;
}

int cmd_propagate(const std::string& file, const std::string& variant_name, const std::string& order_arg,
                  const std::string& cost_model, std::size_t oracle_limit, const std::string& format,
                  std::ostream& out) {
  const Variant variant = parse_variant(variant_name);
  PairData pair = load_pair(file);
  PairSession s = PairSession::open(std::move(pair.jt_a), std::move(pair.jt_b), std::move(pair.dsepset),
                                    SessionOptions{parse_cost_model(cost_model), oracle_limit});
  const auto order = parse_order(order_arg, s, variant);
  const CostReport r = s.run(variant, order);
  const auto deviation = try_deviation(s);
  const auto marginals = s.dsepset_marginals();

  if (format == "json") {
    ordered_json j = report_json(r, deviation);
    ordered_json m = ordered_json::object();
    for (const auto& t : marginals)
      m[t.scope().vars().front().id] = std::vector<double>(t.values().begin(), t.values().end());
    j["marginals"] = std::move(m);
    out << j.dump(2) << "\n";
  } else {
    out << "variant: " << r.variant << "\n";
    out << "order: " << order_text(r.order) << "\n";
    out << "coordination passes: " << r.coordination_passes << "\n";
    out << "finalization passes: " << r.finalization_passes << "\n";
    out << "payload entries: " << r.payload_entries << "\n";
    out << "weighted cost: " << fmt_number(r.weighted_cost) << "\n";
    out << "max deviation: " << (deviation ? fmt_number(*deviation) : std::string("n/a (oracle limit)")) << "\n";
    out << "posterior marginals of d-sepset:\n";
    for (const auto& t : marginals) {
      out << "  " << t.scope().vars().front().id << ":";
      for (double v : t.values()) out << " " << fmt_number(v);
      out << "\n";
    }
  }
  return kOk;
}

int cmd_verify(const std::string& file, double tol, std::uint64_t seed, std::size_t oracle_limit,
               const std::string& format, std::ostream& out) {
  PairData pair = load_pair(file);
  const PairSession base = PairSession::open(std::move(pair.jt_a), std::move(pair.jt_b), std::move(pair.dsepset),
                                             SessionOptions{CostModel::Unit, oracle_limit});
  Rng rng(seed);
  const auto random_order = random_consistent_order(base.linkage_tree(), rng);
  struct Run {
    Variant variant;
    std::string label;
    std::vector<std::size_t> order;
  };
  const std::vector<Run> runs{{Variant::UB1, "default", base.default_order()},
                              {Variant::UB2, "default", base.default_order()},
                              {Variant::UB3, "default", base.default_order()},
                              {Variant::UB3, "optimal", base.optimal_linkage_order()},
                              {Variant::UB1, "random", random_order},
                              {Variant::UB2, "random", random_order},
                              {Variant::UB3, "random", random_order}};

  bool ok = true;
  double worst = 0.0;
  ordered_json results = ordered_json::array();
  std::ostringstream text;
  for (const auto& run : runs) {
    PairSession s = base;
    const auto r = s.run(run.variant, run.order);
    const double dev = s.max_deviation();
    const auto consistency = consistency_check(s.tree_a(), tol);
    bool b_untouched = true;
    for (std::size_t c = 0; c < s.tree_b().size(); ++c)
      if (!(s.tree_b().belief(c) == base.tree_b().belief(c))) b_untouched = false;
    const bool pass = dev <= tol && consistency.consistent && b_untouched;
    ok = ok && pass;
    worst = std::max(worst, dev);
    ordered_json j = report_json(r, dev);
    j["label"] = run.label;
    j["consistent"] = consistency.consistent;
    j["peer_untouched"] = b_untouched;
    j["pass"] = pass;
    results.push_back(std::move(j));
    text << std::left << std::setw(4) << r.variant << " " << std::setw(8) << run.label << " order "
         << std::setw(12) << order_text(r.order) << " deviation " << std::setw(12) << fmt_number(dev)
         << (consistency.consistent ? " consistent" : " INCONSISTENT") << (b_untouched ? "" : " PEER-MUTATED")
         << (pass ? "  ok" : "  FAIL") << "\n";
  }
  if (format == "json") {
    ordered_json j;
    j["tol"] = tol;
    j["seed"] = seed;
    j["runs"] = std::move(results);
    j["max_deviation"] = worst;
    j["ok"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
    out << "max deviation " << fmt_number(worst) << " (tol " << fmt_number(tol) << "): " << (ok ? "PASS" : "FAIL")
        << "\n";
  }
  return ok ? kOk : kVerifyFailed;
}

int cmd_bench(const std::string& file, const std::string& cost_model, const std::string& format, std::ostream& out) {
  PairData pair = load_pair(file);
  const PairSession base = PairSession::open(std::move(pair.jt_a), std::move(pair.jt_b), std::move(pair.dsepset),
                                             SessionOptions{parse_cost_model(cost_model), kDefaultOracleLimit});
  struct Row {
    std::string label;
    CostReport report;
  };
  std::vector<Row> rows;
  const auto def = base.default_order();
  for (auto v : {Variant::UB1, Variant::UB2, Variant::UB3}) {
    PairSession s = base;
    rows.push_back({std::string(to_string(v)) + " default", s.run(v, def)});
  }
  {
    PairSession s = base;
    rows.push_back({"ub3 optimal", s.update_belief3(base.optimal_linkage_order())});
  }
  const auto direct = direct_payload_entries(base.dsepset());

  if (format == "json") {
    ordered_json j;
    j["linkages"] = base.linkage_count();
    j["host_tree_cliques"] = base.host_tree().cliques.size();
    j["cliques"] = base.tree_a().size();
    j["direct_payload_entries"] = direct;
    j["rows"] = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json r = report_json(row.report, std::nullopt);
      r.erase("max_deviation");
      r["label"] = row.label;
      j["rows"].push_back(std::move(r));
    }
    out << j.dump(2) << "\n";
  } else {
    out << "linkages " << base.linkage_count() << ", host tree " << base.host_tree().cliques.size() << " of "
        << base.tree_a().size() << " cliques, cost model " << cost_model << "\n";
    out << std::left << std::setw(14) << "variant" << std::setw(16) << "order" << std::setw(14) << "coordination"
        << std::setw(14) << "finalization" << std::setw(10) << "payload"
        << "weighted\n";
    for (const auto& row : rows)
      out << std::setw(14) << row.label << std::setw(16) << order_text(row.report.order) << std::setw(14)
          << row.report.coordination_passes << std::setw(14) << row.report.finalization_passes << std::setw(10)
          << row.report.payload_entries << fmt_number(row.report.weighted_cost) << "\n";
    out << "direct B(I) payload: " << direct << " entries\n";
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inter-subnet belief propagation between junction trees sharing a d-sepset", "msbn"};
  app.require_subcommand(1);

  std::string file;
  std::string format = "text";
  auto add_format = [&format](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };
  std::size_t oracle_limit = kDefaultOracleLimit;

  auto* tour = app.add_subcommand("tour", "Minimum-weight open tour of a weighted tree");
  bool oracle = false;
  std::size_t brute_limit = kBruteForceLimit;
  tour->add_option("treefile", file, "Tree file")->required();
  tour->add_flag("--oracle", oracle, "Also run the brute-force numbering oracle");
  tour->add_option("--brute-limit", brute_limit, "Largest tree the oracle will enumerate");
  add_format(tour);

  auto* propagate = app.add_subcommand("propagate", "Run one UpdateBelief variant on a pair file");
  std::string variant = "ub3";
  std::string order;
  std::string cost_model = "unit";
  propagate->add_option("pairfile", file, "Pair file")->required();
  propagate->add_option("--variant", variant, "ub1|ub2|ub3")->required()->check(CLI::IsMember({"ub1", "ub2", "ub3"}));
  propagate->add_option("--order", order, "Linkage order: comma-separated 1-based indices, optimal, or default");
  propagate->add_option("--cost-model", cost_model, "unit|statespace")->check(CLI::IsMember({"unit", "statespace"}));
  propagate->add_option("--oracle-limit", oracle_limit, "Joint-table cell limit for the oracle");
  add_format(propagate);

  auto* verify = app.add_subcommand("verify", "Check every variant against the exact posterior");
  double tol = 1e-9;
  std::uint64_t seed = 0;
  verify->add_option("pairfile", file, "Pair file")->required();
  verify->add_option("--tol", tol, "Max-abs deviation tolerance");
  verify->add_option("--seed", seed, "Seed for the random consistent order");
  verify->add_option("--oracle-limit", oracle_limit, "Joint-table cell limit for the oracle");
  add_format(verify);

  auto* bench = app.add_subcommand("bench", "Compare coordination cost of the variants");
  bench->add_option("pairfile", file, "Pair file")->required();
  bench->add_option("--cost-model", cost_model, "unit|statespace")->check(CLI::IsMember({"unit", "statespace"}));
  add_format(bench);

  auto* gen = app.add_subcommand("gen", "Generate random fixtures");
  gen->require_subcommand(1);
  std::string out_path;
  auto* gen_pair_cmd = gen->add_subcommand("pair", "Random junction-tree pair");
  std::size_t shared = 4, private_a = 2, private_b = 2, max_linkages = 4;
  gen_pair_cmd->add_option("--shared", shared, "Number of d-sepset variables");
  gen_pair_cmd->add_option("--private-a", private_a, "Private variables of T^a");
  gen_pair_cmd->add_option("--private-b", private_b, "Private variables of T^b");
  gen_pair_cmd->add_option("--max-linkages", max_linkages, "Upper bound on linkages");
  gen_pair_cmd->add_option("--seed", seed, "Seed");
  gen_pair_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");
  auto* gen_tree_cmd = gen->add_subcommand("tree", "Random weighted tree");
  std::size_t nodes = 8;
  long min_weight = 1, max_weight = 9;
  gen_tree_cmd->add_option("--nodes", nodes, "Node count");
  gen_tree_cmd->add_option("--min-weight", min_weight, "Smallest edge weight");
  gen_tree_cmd->add_option("--max-weight", max_weight, "Largest edge weight");
  gen_tree_cmd->add_option("--seed", seed, "Seed");
  gen_tree_cmd->add_option("--out", out_path, "Output file (stdout if omitted)");

  auto* fixtures = app.add_subcommand("fixtures", "Built-in fixtures");
  fixtures->require_subcommand(1);
  auto* list = fixtures->add_subcommand("list", "List fixture names");
  auto* exp = fixtures->add_subcommand("export", "Write a fixture file");
  std::string name;
  exp->add_option("name", name, "Fixture name")->required();
  exp->add_option("--out", out_path, "Output file (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (tour->parsed()) return cmd_tour(file, oracle, brute_limit, format, out);
    if (propagate->parsed()) return cmd_propagate(file, variant, order, cost_model, oracle_limit, format, out);
    if (verify->parsed()) return cmd_verify(file, tol, seed, oracle_limit, format, out);
    if (bench->parsed()) return cmd_bench(file, cost_model, format, out);
    if (gen_pair_cmd->parsed()) {
      write_output(out_path, serialize_pair(msbn::gen_pair(shared, private_a, private_b, seed, max_linkages)), out);
      return kOk;
    }
    if (gen_tree_cmd->parsed()) {
      write_output(out_path, serialize_tree(msbn::gen_tree(nodes, seed, min_weight, max_weight)), out);
      return kOk;
    }
    if (list->parsed()) {
      for (const auto& n : fixture_names()) out << n << "\n";
      return kOk;
    }
    if (exp->parsed()) {
      write_output(out_path, export_fixture(name), out);
      return kOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace msbn
