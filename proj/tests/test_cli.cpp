#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "msbn/workbench.hpp"

using namespace msbn;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path workdir() {
  auto dir = std::filesystem::temp_directory_path() / "msbn_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = workdir() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("cli tour") {
  const auto file = write("fig7.json", export_fixture("fig7"));
  const auto r = cli({"tour", file, "--oracle", "--brute-limit", "10", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["weight"] == 47);
  CHECK(j["M"] == json::array({18, 21, 20, 21, 19}));
  CHECK(j["x"] == "v2");
  CHECK(j["y"] == "v4");
  CHECK(j["oracle_match"] == true);
  CHECK(j["numbering_consistent"] == true);
  const auto text = cli({"tour", file});
  CHECK(text.code == 0);
  CHECK(text.out.find("weight: 47") != std::string::npos);
  // oracle refuses ten nodes under the default limit
  CHECK(cli({"tour", file, "--oracle"}).code == 1);
}

TEST_CASE("cli bench and propagate on fig4") {
  const auto file = write("fig4.json", export_fixture("fig4"));
  const auto b = cli({"bench", file, "--format", "json"});
  REQUIRE(b.code == 0);
  const auto rows = json::parse(b.out)["rows"];
  CHECK(rows[1]["label"] == "ub2 default");
  CHECK(rows[1]["coordination_passes"] == 16);
  CHECK(rows[2]["coordination_passes"] == 8);
  CHECK(rows[3]["coordination_passes"] == 5);

  const auto p = cli({"propagate", file, "--variant", "ub3", "--order", "5,2,1,3,4", "--format", "json"});
  REQUIRE(p.code == 0);
  const auto j = nlohmann::ordered_json::parse(p.out);
  CHECK(j["coordination_passes"] == 5);
  CHECK(j["order"] == json::array({5, 2, 1, 3, 4}));
  CHECK(j["max_deviation"].get<double>() <= 1e-9);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"variant", "order", "coordination_passes", "finalization_passes",
                                         "payload_entries", "weighted_cost", "max_deviation", "marginals"});
  CHECK(cli({"propagate", file, "--variant", "ub3", "--format", "json"}).out ==
        cli({"propagate", file, "--variant", "ub3", "--format", "json"}).out);
}

TEST_CASE("cli verify exit codes") {
  const auto file = write("pair2l.json", export_fixture("pair2l"));
  CHECK(cli({"verify", file}).code == 0);
  CHECK(cli({"verify", file, "--tol", "-1"}).code == 2);
}

TEST_CASE("cli usage and input errors") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"tour"}).code == 1);
  const auto missing = cli({"tour", (workdir() / "nope.json").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);
  const auto file = write("fig4b.json", export_fixture("fig4"));
  CHECK(cli({"propagate", file, "--variant", "ub9"}).code == 1);
  CHECK(cli({"propagate", file, "--variant", "ub3", "--order", "3,4,1,2,5"}).code == 1);
  CHECK(cli({"propagate", file, "--variant", "ub3", "--order", "1,2,x"}).code == 1);
  const auto bad = write("bad.json", "{\"variables\": [");
  CHECK(cli({"verify", bad}).err.find("parse error") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli generators and fixtures") {
  const auto g = cli({"gen", "pair", "--shared", "5", "--private-a", "2", "--private-b", "1", "--seed", "9"});
  REQUIRE(g.code == 0);
  CHECK(g.out == serialize_pair(gen_pair(5, 2, 1, 9)));
  const auto out = (workdir() / "tree.json").string();
  CHECK(cli({"gen", "tree", "--nodes", "6", "--seed", "3", "--out", out}).code == 0);
  CHECK(load_tree(out).size() == 6);
  CHECK(cli({"fixtures", "list"}).out.find("payload10") != std::string::npos);
  CHECK(cli({"fixtures", "export", "fig5"}).out == export_fixture("fig5"));
  CHECK(cli({"fixtures", "export", "nope"}).code == 1);
  std::filesystem::remove_all(workdir());
}
