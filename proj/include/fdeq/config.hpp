#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fdeq/model.hpp"

namespace fdeq {

struct GridSpec {
  double lo = 0, hi = 0;
  int points = 0;
};

struct SolveOptions {
  std::optional<GridSpec> grid; // default: pilot-based
  double epsilon = 1e-3;
  double tolerance = 1e-10;
  int max_iter = 10000;
  double damping = 1.0;
  int quad_nodes = 200;
  bool midpoint_quadrature = false; // Riemann cross-check rule
  std::optional<double> richardson_epsilon; // experimental two-epsilon step
};

struct McOptions {
  int m = 1;
  int reps = 1;
  std::uint64_t seed = 1;
  int bins = 100;
};

struct ParsedConfig {
  ModelSpec spec;
  SolveOptions solve;
  McOptions mc;
  std::string polynomial_text;
};

/// Parse the TOML-like model configuration. Relative CSV paths in [[matrix]]
/// tables resolve against `base_dir`.
ParsedConfig parse_config(const std::string& text, const std::string& base_dir = ".");

ParsedConfig parse_config_file(const std::string& path);

/// CSV matrix format: one row per line, entries "re", "re+imj" or "re-imj"
/// separated by commas.
CMatrix load_matrix_csv(const std::string& path);

cpx parse_complex_entry(const std::string& text);
std::string format_complex_entry(cpx v);

GridSpec parse_grid_spec(const std::string& text); // "a:b:n"

} // namespace fdeq
