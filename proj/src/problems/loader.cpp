#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "slowvary/error.hpp"
#include "slowvary/problems/problem.hpp"

namespace slowvary::problems {

namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') || (v.front() == '\'' && v.back() == '\'')))
    return v.substr(1, v.size() - 2);
  return v;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int n = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ValidationError("'" + key + "' must be an integer, got '" + v + "'");
  }
}

LoadedProblem from_tree(const pt::ptree& tree) {
  static const std::set<std::string> known{"problem", "params", "nonlinearity", "coupling"};
  for (const auto& [section, body] : tree)
    if (!known.count(section)) throw ValidationError("unknown section [" + section + "]");

  auto problem = tree.get_child_optional("problem");
  if (!problem || !problem->get_optional<std::string>("name"))
    throw ValidationError("problem file needs [problem] name = <builtin>");
  LoadedProblem out{builtin(unquote(problem->get<std::string>("name"))), std::nullopt};
  for (const auto& [key, v] : *problem) {
    if (key == "order") {
      out.order = to_int("order", unquote(v.data()));
    } else if (key != "name") {
      throw ValidationError("unknown key '" + key + "' in [problem]");
    }
  }
  ProblemSpec& spec = out.spec;

  if (auto params = tree.get_child_optional("params"))
    for (const auto& [key, v] : *params) spec.set_param(key, unquote(v.data()));

  if (auto nl = tree.get_child_optional("nonlinearity")) {
    std::vector<Multinomial> f(spec.space.kind == crosssec::SpaceKind::FiniteDim ? spec.space.cap : 1);
    for (const auto& [key, v] : *nl) {
      std::string text = unquote(v.data());
      if (key == "expr" && f.size() == 1) {
        f[0] = parse_multinomial(text);
        continue;
      }
      auto it = std::find(spec.fields.begin(), spec.fields.end(), key);
      if (it == spec.fields.end() || f.size() == 1)
        throw ValidationError("unknown key '" + key + "' in [nonlinearity]");
      f[it - spec.fields.begin()] = parse_multinomial(text);
    }
    spec.nonlinearity = std::move(f);
  }

  if (auto cp = tree.get_child_optional("coupling")) {
    for (const auto& [key, v] : *cp) {
      if (key != "modes") throw ValidationError("unknown key '" + key + "' in [coupling]");
      spec.coupling_modes = to_int("modes", unquote(v.data()));
      if (spec.coupling_modes < 0) throw ValidationError("coupling modes must be non-negative");
    }
  }
  return out;
}

}  // namespace

LoadedProblem load_problem_text(const std::string& text) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("problem file: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return from_tree(tree);
}

LoadedProblem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read problem file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_problem_text(ss.str());
}

LoadedProblem resolve_problem(const std::string& name_or_path) {
  for (const auto& n : builtin_names())
    if (n == name_or_path) return {builtin(n), std::nullopt};
  if (std::filesystem::exists(name_or_path)) return load_problem_file(name_or_path);
  throw ValidationError("unknown problem '" + name_or_path + "'");
}

}  // namespace slowvary::problems
