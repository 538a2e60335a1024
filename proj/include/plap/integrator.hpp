#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "plap/absorption.hpp"
#include "plap/field.hpp"
#include "plap/graph.hpp"
#include "plap/operator.hpp"

namespace plap {

/// M = sum_x u(x) m(x).
template <typename Derived>
typename Derived::Scalar mass(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  if (u.size() != g.size()) throw std::invalid_argument("field size does not match the graph");
  return u.dot(g.measure().template cast<Scalar>());
}

struct IsolatedVertex {};
using GraphSource = std::variant<LatticeSpec, std::filesystem::path, IsolatedVertex>;

WeightedGraph make_graph(const GraphSource& source);

/// Geometric sampling t_k = t_first * ratio^k. count == 0 means "until t_end".
struct OutputSchedule {
  double t_first = 1.0;
  double ratio = 1.2589254117941673;  // 10^(1/10)
  int count = 0;

  /// Sample times in (0, t_end], always ending with t_end.
  std::vector<double> times(double t_end) const;
};

struct StepTolerances {
  /// Largest accepted max_x |u_next - u| / sup(u).
  double rel_step_cap = 0.05;
  /// Values in [-eps * sup(u), 0) are clamped to 0; anything lower rejects.
  double positivity_eps = 1e-12;
};

struct SimConfig {
  double p = 2.0;
  double r = 2.0;
  AbsorptionProfile profile;
  GraphSource graph = LatticeSpec{};
  double t_end = 1.0;
  double dt_init = 1e-3;
  double dt_safety = 0.9;
  double dt_max = std::numeric_limits<double>::infinity();
  /// Stiffness failure once dt drops below dt_floor * max(1, t).
  double dt_floor = 1e-14;
  /// Accepted steps in a row before dt grows by dt_safety^(-1/2).
  int grow_after = 4;
  StepTolerances tolerances;
  OutputSchedule output;
  /// Truncation alarm once cumulative boundary flux exceeds this fraction of M(0).
  double flux_alarm_fraction = 1e-3;

  /// Throws std::invalid_argument naming the broken constraint.
  void validate() const;
};

/// Checks 2 <= p < r + 1; throws std::invalid_argument otherwise.
void check_exponent_window(double p, double r);

struct StepBalance {
  /// dt * absorption rate, less the mass restored by clamping.
  double absorbed = 0.0;
  /// dt * boundary flux.
  double flux = 0.0;
  double clamped = 0.0;
  double rel_change = 0.0;
};

/// Forward-Euler stepper with a reusable workspace. prepare() evaluates the
/// right-hand side once; try_step() can then be retried with smaller dt.
class Stepper {
 public:
  Stepper(const WeightedGraph& g, double p, double r, Eigen::VectorXd q_density,
          StepTolerances tolerances = {});

  void prepare(const ScalarField& u);

  /// Writes u + dt * rhs(u) into `next`. Returns false (leaving `next`
  /// unspecified) if positivity or the relative-change cap would be violated.
  bool try_step(const ScalarField& u, double dt, ScalarField& next, StepBalance& balance) const;

  const ScalarField& slope() const { return slope_; }
  double absorption_rate() const { return absorption_rate_; }
  double boundary_flux() const { return boundary_flux_; }
  double sup() const { return sup_; }
  /// Largest dt the relative-change cap admits at the prepared state.
  double admissible_dt() const;

 private:
  const WeightedGraph& graph_;
  double p_;
  double r_;
  Eigen::VectorXd q_;
  StepTolerances tol_;
  ScalarField slope_;
  double absorption_rate_ = 0.0;
  double boundary_flux_ = 0.0;
  double sup_ = 0.0;
  double max_slope_ = 0.0;
};

struct StepOutcome {
  ScalarField u_next;
  bool accepted = false;
  StepBalance balance;
};

/// One explicit Euler step of u_t = Delta_p u - q u^r.
StepOutcome step(const WeightedGraph& g, const ScalarField& u, double p, double r,
                 const AbsorptionProfile& profile, double dt, const StepTolerances& tolerances = {});

struct Record {
  double t = 0.0;
  double mass = 0.0;
  double sup = 0.0;
  double flux_cum = 0.0;
  double absorbed_cum = 0.0;
  double dt = 0.0;
};

struct DecaySeries {
  std::vector<Record> records;
  bool truncation_alarm = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Largest per-step |M_{n+1} - (M_n - absorbed - flux)| / M_n.
  double max_step_defect = 0.0;
};

class StiffnessFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Called at t = 0 and at every sample time with the current state.
using SampleObserver = std::function<void(double t, const ScalarField& u)>;

/// Integrates from u0 to config.t_end with adaptive dt. Throws
/// StiffnessFailure if dt collapses; a truncation alarm only flags the series.
DecaySeries run(const WeightedGraph& g, const SimConfig& config, const ScalarField& u0,
                const SampleObserver& observer = {});

/// Lattice radius that keeps the effective support of the solution inside
/// the truncation up to t_end: c sqrt(t_end) for p = 2, and
/// c (t_end sup(u0)^(p-2))^(1/p) for p > 2.
int suggest_lattice_radius(double p, double t_end, double sup_u0, double c = 8.0);

void write_series_csv(std::ostream& out, const DecaySeries& series);
void write_series_csv(const std::filesystem::path& path, const DecaySeries& series);
/// Reads records back; throws std::runtime_error on a schema mismatch.
DecaySeries read_series_csv(std::istream& in);
DecaySeries read_series_csv(const std::filesystem::path& path);

}  // namespace plap
