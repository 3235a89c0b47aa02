#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "msbn/error.hpp"
#include "msbn/workbench.hpp"

namespace msbn {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("parse error: ") + e.what());
  }
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
  return *it;
}

const json& array_field(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_array()) throw ValidationError(where + "." + key + ": expected an array");
  return v;
}

std::string string_value(const json& v, const std::string& where) {
  if (!v.is_string()) throw ValidationError(where + ": expected a string");
  return v.get<std::string>();
}

double number_value(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + ": expected a number");
  return v.get<double>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

JunctionTree parse_tree_side(const json& doc, const std::string& side, const std::map<std::string, Variable>& vars) {
  const json& node = field(doc, side, "pair");
  const json& cliques = array_field(node, "cliques", side);
  std::vector<Clique> parsed;
  std::vector<std::pair<std::string, PotentialTable>> potentials;
  for (std::size_t k = 0; k < cliques.size(); ++k) {
    const std::string where = side + ".cliques[" + std::to_string(k) + "]";
    const std::string id = string_value(field(cliques[k], "id", where), where + ".id");
    const json& var_list = array_field(cliques[k], "vars", where);
    std::vector<Variable> members;
    for (std::size_t v = 0; v < var_list.size(); ++v) {
      const std::string vid = string_value(var_list[v], where + ".vars[" + std::to_string(v) + "]");
      auto it = vars.find(vid);
      if (it == vars.end())
        throw ValidationError(where + " ('" + id + "'): undefined variable '" + vid + "'");
      members.push_back(it->second);
    }
    Scope scope;
    try {
      scope = Scope(members);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(where + " ('" + id + "'): " + e.what());
    }
    for (std::size_t v = 0; v < members.size(); ++v)
      if (members[v].id != scope.vars()[v].id)
        throw ValidationError(where + " ('" + id + "').vars: not in canonical (sorted) order");
    const json& values = array_field(cliques[k], "potential", where);
    if (values.size() != scope.state_space())
      throw ValidationError(where + " ('" + id + "').potential: length mismatch (expected " +
                            std::to_string(scope.state_space()) + ", got " + std::to_string(values.size()) + ")");
    std::vector<double> data;
    for (std::size_t v = 0; v < values.size(); ++v)
      data.push_back(number_value(values[v], where + ".potential[" + std::to_string(v) + "]"));
    try {
      potentials.emplace_back(id, PotentialTable(scope, std::move(data)));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(where + " ('" + id + "').potential: " + e.what());
    }
    parsed.push_back(Clique{id, scope});
  }

  const json& edge_list = array_field(node, "edges", side);
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    const std::string where = side + ".edges[" + std::to_string(k) + "]";
    if (!edge_list[k].is_array() || edge_list[k].size() != 2)
      throw ValidationError(where + ": expected a pair of clique ids");
    edges.emplace_back(string_value(edge_list[k][0], where + "[0]"), string_value(edge_list[k][1], where + "[1]"));
  }

  JunctionTree jt;
  try {
    jt = JunctionTree(std::move(parsed), edges);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(side + ": " + e.what());
  }
  const auto report = validate_jt(jt);
  if (!report.valid) throw ValidationError(side + ": " + report.violations.front());
  for (auto& [id, table] : potentials) jt.set_belief(jt.index_of(id), std::move(table));
  return jt;
}

ordered_json tree_side_json(const JunctionTree& jt) {
  ordered_json node;
  node["cliques"] = ordered_json::array();
  for (std::size_t i = 0; i < jt.size(); ++i) {
    ordered_json c;
    c["id"] = jt.id(i);
    c["vars"] = jt.clique(i).vars.ids();
    c["potential"] = std::vector<double>(jt.belief(i).values().begin(), jt.belief(i).values().end());
    node["cliques"].push_back(std::move(c));
  }
  node["edges"] = ordered_json::array();
  for (const auto& e : jt.edges()) node["edges"].push_back({jt.id(e.a), jt.id(e.b)});
  return node;
}

}  // namespace

PairData parse_pair(const std::string& text) {
  const json doc = parse_document(text);
  std::map<std::string, Variable> vars;
  const json& var_list = array_field(doc, "variables", "pair");
  for (std::size_t k = 0; k < var_list.size(); ++k) {
    const std::string where = "variables[" + std::to_string(k) + "]";
    const std::string id = string_value(field(var_list[k], "id", where), where + ".id");
    const json& card = field(var_list[k], "cardinality", where);
    if (!card.is_number_integer() || card.get<long long>() < 2)
      throw ValidationError(where + " ('" + id + "').cardinality: expected an integer >= 2");
    if (!vars.emplace(id, Variable{id, card.get<std::size_t>()}).second)
      throw ValidationError(where + ": duplicate variable '" + id + "'");
  }

  PairData pair;
  pair.jt_a = parse_tree_side(doc, "jt_a", vars);
  pair.jt_b = parse_tree_side(doc, "jt_b", vars);

  const json& dsep = array_field(doc, "dsepset", "pair");
  std::vector<Variable> members;
  for (std::size_t k = 0; k < dsep.size(); ++k) {
    const std::string vid = string_value(dsep[k], "dsepset[" + std::to_string(k) + "]");
    auto it = vars.find(vid);
    if (it == vars.end()) throw ValidationError("dsepset: undefined variable '" + vid + "'");
    members.push_back(it->second);
  }
  try {
    pair.dsepset = Scope(members);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("dsepset: ") + e.what());
  }
  if (pair.dsepset.empty()) throw ValidationError("dsepset: must not be empty");
  return pair;
}

std::string serialize_pair(const PairData& pair) {
  const Scope all = pair.jt_a.variables().unite(pair.jt_b.variables()).unite(pair.dsepset);
  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (const auto& v : all.vars()) doc["variables"].push_back({{"id", v.id}, {"cardinality", v.cardinality}});
  doc["jt_a"] = tree_side_json(pair.jt_a);
  doc["jt_b"] = tree_side_json(pair.jt_b);
  doc["dsepset"] = pair.dsepset.ids();
  return doc.dump(2) + "\n";
}

PairData load_pair(const std::filesystem::path& path) { return parse_pair(read_file(path)); }

void save_pair(const std::filesystem::path& path, const PairData& pair) { write_file(path, serialize_pair(pair)); }

WeightedTree parse_tree(const std::string& text) {
  const json doc = parse_document(text);
  std::vector<WeightedTree::NodeSpec> nodes;
  const json& node_list = array_field(doc, "nodes", "tree");
  for (std::size_t k = 0; k < node_list.size(); ++k) {
    const std::string where = "nodes[" + std::to_string(k) + "]";
    WeightedTree::NodeSpec spec;
    spec.id = string_value(field(node_list[k], "id", where), where + ".id");
    if (auto it = node_list[k].find("host"); it != node_list[k].end()) {
      if (!it->is_boolean()) throw ValidationError(where + ".host: expected a boolean");
      spec.host = it->get<bool>();
    }
    nodes.push_back(std::move(spec));
  }
  std::vector<WeightedTree::EdgeSpec> edges;
  const json& edge_list = array_field(doc, "edges", "tree");
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    const std::string where = "edges[" + std::to_string(k) + "]";
    WeightedTree::EdgeSpec spec;
    spec.u = string_value(field(edge_list[k], "u", where), where + ".u");
    spec.v = string_value(field(edge_list[k], "v", where), where + ".v");
    spec.weight = number_value(field(edge_list[k], "weight", where), where + ".weight");
    edges.push_back(std::move(spec));
  }
  try {
    return WeightedTree(std::move(nodes), edges);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("tree: ") + e.what());
  }
}

std::string serialize_tree(const WeightedTree& tree) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) doc["nodes"].push_back({{"id", tree.id(i)}, {"host", tree.host(i)}});
  doc["edges"] = ordered_json::array();
  for (const auto& e : tree.edges())
    doc["edges"].push_back({{"u", tree.id(e.u)}, {"v", tree.id(e.v)}, {"weight", e.weight}});
  return doc.dump(2) + "\n";
}

WeightedTree load_tree(const std::filesystem::path& path) { return parse_tree(read_file(path)); }

void save_tree(const std::filesystem::path& path, const WeightedTree& tree) { write_file(path, serialize_tree(tree)); }

}  // namespace msbn
