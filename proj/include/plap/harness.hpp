#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "plap/config.hpp"
#include "plap/fit.hpp"
#include "plap/integrator.hpp"
#include "plap/theory.hpp"

namespace plap {

struct ReportRow {
  std::string label;
  double p = 0.0;
  double r = 0.0;
  int N = 0;
  AbsorptionProfile profile;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  /// Log-log secant slope of the mass envelope's rate part over the window.
  double predicted_slope = 0.0;
  /// Statistics of e(t) = M(t) / mass_envelope(t) over the fit window.
  double env_ratio_max = 0.0;
  double env_ratio_min = 0.0;
  double env_ratio_final = 0.0;
  /// max e(t): the smallest constant for which the envelope bounds M here.
  double fitted_C = 0.0;
  /// Statistics of sup(u) / sup_envelope(t, M) over the fit window.
  double sup_ratio_max = 0.0;
  double sup_ratio_final = 0.0;
  double mass_ratio = 0.0;
  bool decay = false;
  bool truncation_alarm = false;
  /// Non-empty when a decay verdict contradicts the critical exponent.
  std::string finding;
  /// Non-empty when the run failed; the other fields are then unset.
  std::string error;
};

/// Initial mass outside B(R), for the envelope's tail term.
std::function<double(double)> tail_mass(const WeightedGraph& g, const ScalarField& u0);

/// Derives a report row from a finished run.
ReportRow evaluate_series(const RunSpec& run, const ExperimentPlan& plan, const DecaySeries& series,
                          const std::function<double(double)>& u0_tail);

struct RunOptions {
  /// Overrides the plan's worker count when > 0.
  int workers = 0;
  bool write_files = true;
};

/// Runs every config in a worker pool, writes <output_dir>/<label>.csv per run
/// and <output_dir>/summary.csv. Rows come back in plan order whatever the
/// worker count; a failing run sets its row's error and the sweep continues.
std::vector<ReportRow> run_experiment(const ExperimentPlan& plan, const RunOptions& options = {});

void write_summary_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Rows of t, R(t), mass rate, sup envelope at M = 1, r* for every mode,
/// lambda, H and gamma. Throws std::invalid_argument if some t < Phi(1).
void theory_report(std::ostream& out, const RateModel& model, const std::vector<double>& t_list);

}  // namespace plap
