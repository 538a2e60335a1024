#include "plap/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace plap {

WeightedGraph make_graph(const GraphSource& source) {
  struct Visitor {
    WeightedGraph operator()(const LatticeSpec& spec) const { return build_lattice(spec); }
    WeightedGraph operator()(const std::filesystem::path& path) const { return load_edge_list(path); }
    WeightedGraph operator()(const IsolatedVertex&) const { return WeightedGraph::isolated_vertex(); }
  };
  return std::visit(Visitor{}, source);
}

std::vector<double> OutputSchedule::times(double t_end) const {
  if (!(t_first > 0.0) || !(ratio > 1.0)) {
    throw std::invalid_argument("output schedule needs t_first > 0 and ratio > 1");
  }
  std::vector<double> out;
  for (int k = 0; count == 0 || k < count; ++k) {
    const double t = t_first * std::pow(ratio, k);
    if (t >= t_end * (1.0 - 1e-12)) break;
    out.push_back(t);
  }
  out.push_back(t_end);
  return out;
}

void check_exponent_window(double p, double r) {
  if (!std::isfinite(p) || !std::isfinite(r)) throw std::invalid_argument("p and r must be finite");
  if (p < 2.0) {
    throw std::invalid_argument("p = " + std::to_string(p) + " violates 2 <= p < r+1 (p < 2)");
  }
  if (r + 1.0 - p <= 0.0) {
    throw std::invalid_argument("p = " + std::to_string(p) + ", r = " + std::to_string(r) +
                                " violates 2 <= p < r+1 (r+1-p <= 0)");
  }
}

void SimConfig::validate() const {
  check_exponent_window(p, r);
  profile.validate();
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(t_end > 0.0)) fail("t_end must be > 0");
  if (!(dt_init > 0.0)) fail("dt_init must be > 0");
  if (!(dt_safety > 0.0 && dt_safety < 1.0)) fail("dt_safety must lie in (0, 1)");
  if (!(dt_max > 0.0)) fail("dt_max must be > 0");
  if (!(dt_floor > 0.0)) fail("dt_floor must be > 0");
  if (grow_after < 1) fail("grow_after must be >= 1");
  if (!(tolerances.rel_step_cap > 0.0)) fail("rel_step_cap must be > 0");
  if (!(tolerances.positivity_eps >= 0.0)) fail("positivity_eps must be >= 0");
  if (!(flux_alarm_fraction > 0.0)) fail("flux_alarm_fraction must be > 0");
  if (!(output.t_first > 0.0) || !(output.ratio > 1.0) || output.count < 0) {
    fail("output schedule needs t_first > 0, ratio > 1, count >= 0");
  }
}

Stepper::Stepper(const WeightedGraph& g, double p, double r, Eigen::VectorXd q_density,
                 StepTolerances tolerances)
    : graph_(g), p_(p), r_(r), q_(std::move(q_density)), tol_(tolerances) {
  if (q_.size() != g.size()) throw std::invalid_argument("density size does not match the graph");
}

void Stepper::prepare(const ScalarField& u) {
  rhs_into(graph_, u, p_, r_, q_, slope_);
  absorption_rate_ = plap::absorption_rate(graph_, u, r_, q_);
  boundary_flux_ = plap::boundary_flux(graph_, u, p_);
  sup_ = u.size() > 0 ? u.maxCoeff() : 0.0;
  max_slope_ = slope_.size() > 0 ? slope_.cwiseAbs().maxCoeff() : 0.0;
}

double Stepper::admissible_dt() const {
  if (!(max_slope_ > 0.0) || !(sup_ > 0.0)) return std::numeric_limits<double>::infinity();
  return tol_.rel_step_cap * sup_ / max_slope_ * (1.0 - 1e-12);
}

bool Stepper::try_step(const ScalarField& u, double dt, ScalarField& next,
                       StepBalance& balance) const {
  balance = {};
  if (!(sup_ > 0.0)) {
    next = u;
    return true;
  }
  balance.rel_change = dt * max_slope_ / sup_;
  if (balance.rel_change > tol_.rel_step_cap) return false;

  next = u + dt * slope_;
  const double floor = -tol_.positivity_eps * sup_;
  if (next.minCoeff() < floor) return false;

  double clamped = 0.0;
  for (Index x = 0; x < next.size(); ++x) {
    if (next[x] < 0.0) {
      clamped += -next[x] * graph_.measure(x);
      next[x] = 0.0;
    }
  }
  balance.clamped = clamped;
  balance.absorbed = dt * absorption_rate_ - clamped;
  balance.flux = dt * boundary_flux_;
  return true;
}

StepOutcome step(const WeightedGraph& g, const ScalarField& u, double p, double r,
                 const AbsorptionProfile& profile, double dt, const StepTolerances& tolerances) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  Stepper stepper(g, p, r, absorption_density(g, profile), tolerances);
  stepper.prepare(u);
  StepOutcome out;
  out.accepted = stepper.try_step(u, dt, out.u_next, out.balance);
  if (!out.accepted) out.u_next = u;
  return out;
}

DecaySeries run(const WeightedGraph& g, const SimConfig& config, const ScalarField& u0,
                const SampleObserver& observer) {
  config.validate();
  if (u0.size() != g.size()) throw std::invalid_argument("initial data size does not match the graph");
  if (!u0.allFinite()) throw std::invalid_argument("initial data must be finite");
  if (u0.minCoeff() < 0.0) throw std::invalid_argument("initial data must be nonnegative");
  if (!(u0.maxCoeff() > 0.0)) throw std::invalid_argument("initial data is identically zero");

  Stepper stepper(g, config.p, config.r, absorption_density(g, config.profile), config.tolerances);
  ScalarField u = u0;
  ScalarField next(u.size());

  const double mass0 = mass(g, u);
  double mass_now = mass0;
  long double absorbed_cum = 0.0L;
  long double flux_cum = 0.0L;

  DecaySeries series;
  auto record = [&](double t, double dt_used) {
    series.records.push_back({t, mass_now, u.maxCoeff(), static_cast<double>(flux_cum),
                              static_cast<double>(absorbed_cum), dt_used});
    if (observer) observer(t, u);
  };
  record(0.0, 0.0);

  const auto samples = config.output.times(config.t_end);
  double t = 0.0;
  double dt = std::min(config.dt_init, config.dt_max);
  double last_dt = 0.0;
  int streak = 0;
  const double growth = 1.0 / std::sqrt(config.dt_safety);

  for (double target : samples) {
    while (t < target) {
      stepper.prepare(u);
      StepBalance balance;
      for (;;) {
        double h = std::min(dt, stepper.admissible_dt());
        if (h < config.dt_floor * std::max(1.0, t)) {
          std::ostringstream msg;
          msg.precision(6);
          msg << "stiffness failure at t = " << t << ": dt = " << h
              << " fell below the floor (sup = " << stepper.sup()
              << ", relative change at the last try = " << balance.rel_change << ")";
          throw StiffnessFailure(msg.str());
        }
        const bool landing = h >= target - t;
        if (landing) h = target - t;
        if (stepper.try_step(u, h, next, balance)) {
          t = landing ? target : t + h;
          last_dt = h;
          break;
        }
        ++series.rejected_steps;
        streak = 0;
        dt = h / 2.0;
      }

      const double mass_next = mass(g, next);
      const double expected = mass_now - balance.absorbed - balance.flux;
      if (mass_now > 0.0) {
        series.max_step_defect =
            std::max(series.max_step_defect, std::abs(mass_next - expected) / mass_now);
      }
      absorbed_cum += balance.absorbed;
      flux_cum += balance.flux;
      mass_now = mass_next;
      u.swap(next);
      ++series.accepted_steps;

      if (++streak >= config.grow_after) {
        dt = std::min(dt * growth, config.dt_max);
        streak = 0;
      }
    }
    if (static_cast<double>(flux_cum) > config.flux_alarm_fraction * mass0) {
      series.truncation_alarm = true;
    }
    record(t, last_dt);
  }
  return series;
}

int suggest_lattice_radius(double p, double t_end, double sup_u0, double c) {
  if (!(t_end > 0.0) || !(c > 0.0) || p < 2.0) {
    throw std::invalid_argument("suggest_lattice_radius: needs t_end > 0, c > 0, p >= 2");
  }
  const double scale = p == 2.0 ? std::sqrt(t_end) : std::pow(t_end * std::pow(sup_u0, p - 2.0), 1.0 / p);
  return std::max(1, static_cast<int>(std::ceil(c * scale)));
}

}  // namespace plap
