#include <sstream>

#include <json.hpp>

#include "slowvary/cli/cli.hpp"

namespace slowvary::cli {

namespace {

void section(std::ostringstream& os, const std::string& title, const Entries& entries) {
  os << title << "\n";
  if (entries.empty()) os << "  (none)\n";
  for (const auto& [k, v] : entries) os << "  " << k << " = " << v << "\n";
}

void section(std::ostringstream& os, const std::string& title, const std::vector<std::string>& lines) {
  os << title << "\n";
  if (lines.empty()) os << "  (none)\n";
  for (const auto& l : lines) os << "  " << l << "\n";
}

nlohmann::ordered_json tree(const Entries& entries) {
  auto j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries) j[k] = v;
  return j;
}

}  // namespace

std::string report_text(const ModelReport& r) {
  std::ostringstream os;
  os << "problem: " << r.problem << "\n"
     << "order: " << r.order << "\n"
     << "construction: " << r.construction << "\n"
     << "grading: " << r.grading << "\n"
     << "tool: slowvary " << kToolVersion << "\n\n";
  std::vector<std::string> model;
  std::istringstream lines(r.model);
  for (std::string l; std::getline(lines, l);) model.push_back(l);
  section(os, "MODEL", model);
  section(os, "COEFFICIENTS", r.coefficients);
  section(os, "MANIFOLD", r.manifold);
  section(os, "EVOLUTION", r.evolution);
  section(os, "COUPLING_ERROR", r.coupling_error);
  section(os, "ESTIMATES", r.estimates);
  section(os, "TRANSIENT_TAG", std::vector<std::string>{r.transient_tag});
  section(os, "LOG", r.log);
  return os.str();
}

std::string report_tree(const ModelReport& r) {
  nlohmann::ordered_json j;
  j["provenance"] = {{"problem", r.problem},
                     {"order", r.order},
                     {"construction", r.construction},
                     {"grading", r.grading},
                     {"tool", std::string("slowvary ") + kToolVersion}};
  j["model"] = r.model;
  j["coefficients"] = tree(r.coefficients);
  j["manifold"] = tree(r.manifold);
  j["evolution"] = tree(r.evolution);
  j["coupling_error"] = tree(r.coupling_error);
  j["estimates"] = r.estimates;
  j["transient_tag"] = r.transient_tag;
  j["log"] = r.log;
  return j.dump(2) + "\n";
}

}  // namespace slowvary::cli
