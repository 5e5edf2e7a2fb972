#pragma once

#include <string>
#include <utility>
#include <vector>

namespace slowvary {

using Entries = std::vector<std::pair<std::string, std::string>>;

/// Result of a construction in canonical text form, ready for serialization.
/// Expressions use the canonical expression grammar so reports diff cleanly.
struct ModelReport {
  std::string problem;
  int order = 0;
  std::string construction;  // linear, normal-form, nonlinear
  std::string grading;
  std::string model;  // the slowly varying PDE, one line per amplitude
  Entries coefficients;
  Entries manifold;
  Entries evolution;
  Entries coupling_error;
  std::vector<std::string> estimates;
  std::string transient_tag = "O(exp(-gamma*t))";
  std::vector<std::string> log;
};

}  // namespace slowvary
