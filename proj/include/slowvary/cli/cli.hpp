#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slowvary/report.hpp"

namespace slowvary::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kBadArguments = 2,
  kValidation = 3,
  kConstruction = 4,
  kAcceptance = 5,
};

// Human-readable report: provenance header, then one block per section.
std::string report_text(const ModelReport& r);

/// Structured report as a nested key/value tree (JSON text). Sections keep
/// construction order, so identical inputs give byte-identical files.
std::string report_tree(const ModelReport& r);

// Entry point behind the slowvary executable; returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slowvary::cli
