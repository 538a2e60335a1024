#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "plap/integrator.hpp"
#include "plap/theory.hpp"

namespace plap {

/// Parse or validation failure; the message starts with "<file>:<line>:".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialData {
  enum class Kind { delta, box, file };
  Kind kind = Kind::delta;
  /// Total mass for delta and box data.
  double mass = 1.0;
  /// Box support B(radius).
  int radius = 1;
  /// Per-vertex values: "<label> <value>" lines, or "<c1> .. <cN> <value>" on lattices.
  std::filesystem::path file;
};

/// u0 on g. Throws std::invalid_argument for unusable data.
ScalarField make_initial(const WeightedGraph& g, const InitialData& initial);

struct RunSpec {
  std::string label;
  SimConfig config;
  InitialData initial;
  /// Volume-growth dimension N used by the rate formulas.
  int volume_dim = 1;
};

struct ExperimentPlan {
  std::vector<RunSpec> runs;
  /// Defaults to the last decade [t_end/10, t_end] of each run.
  std::optional<std::pair<double, double>> fit_window;
  bool compare_envelope = true;
  /// "decay" verdict iff M(t_end)/M(0) is below this.
  double decay_threshold = 0.05;
  std::filesystem::path output_dir = "out";
  int workers = 1;

  std::pair<double, double> window_for(const RunSpec& run) const;
};

/// Reads a YAML plan. Scalars under equation.{p,r}, absorption.{c,alpha,beta}
/// and graph.lattice.{dim,radius} may be lists; the plan is their cartesian
/// product. Relative paths resolve against the plan's directory.
ExperimentPlan parse_config(const std::filesystem::path& path);
ExperimentPlan parse_config_text(const std::string& text, const std::string& source_name,
                                 const std::filesystem::path& base_dir = ".");

/// Reads a YAML rate model: p, r, N and an optional absorption section.
RateModel parse_rate_model(const std::filesystem::path& path);
RateModel parse_rate_model_text(const std::string& text, const std::string& source_name);

}  // namespace plap
