#pragma once

#include "abw/walk.hpp"

#include <string>
#include <vector>

namespace abw {

// One walk step as written in a config file: coordinates in the coweight
// basis (building flavor) or plain integer coordinates (lattice flavor),
// plus the probability mass of that step class.
struct ConfigStep {
  std::vector<int> mu;
  double a = 0;
  bool operator==(const ConfigStep&) const = default;
};

// A parsed experiment configuration.  "kind" is a root-system letter for
// building walks or "Z" for the integer lattice; flavor defaults from it.
// Optional blocks fall back to the defaults below, so a minimal file needs
// only system and walk.steps.
struct RunConfig {
  std::string kind;
  int rank = 0;
  std::vector<double> q;  // one entry per simple root; empty for the lattice
  Flavor flavor = Flavor::lattice;
  std::vector<ConfigStep> steps;
  int grid_n = 128;
  std::vector<int64_t> n_list = {40, 80, 160};
  double epsilon = 0.05;
  double K = 1.0;
  bool operator==(const RunConfig&) const = default;
};

// Strict JSON parse: unknown keys are rejected at every level and every
// diagnostic names the offending field.  parse_config reads the file at
// path and prefixes diagnostics with it.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

// Emission with every field explicit; parse_config_text(emit_config(c))
// reproduces c exactly.
std::string emit_config(const RunConfig& cfg);

// The kernel the configuration describes, spherical context included for
// building flavor.
Kernel kernel_from_config(const RunConfig& cfg);

}  // namespace abw
