#include "plap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "plap/csv.hpp"

namespace plap {

std::function<double(double)> tail_mass(const WeightedGraph& g, const ScalarField& u0) {
  // beyond[d] = initial mass at depth > d
  std::vector<double> by_depth(static_cast<std::size_t>(g.truncation_radius()) + 1, 0.0);
  for (Index x = 0; x < g.size(); ++x) by_depth[static_cast<std::size_t>(g.depth(x))] += u0[x] * g.measure(x);
  std::vector<double> beyond(by_depth.size(), 0.0);
  for (std::size_t d = by_depth.size() - 1; d-- > 0;) beyond[d] = beyond[d + 1] + by_depth[d + 1];
  const double total = beyond.front() + by_depth.front();
  return [beyond = std::move(beyond), total](double R) {
    if (R < 0.0) return total;
    const auto d = static_cast<std::size_t>(std::floor(R));
    return d < beyond.size() ? beyond[d] : 0.0;
  };
}

ReportRow evaluate_series(const RunSpec& run, const ExperimentPlan& plan, const DecaySeries& series,
                          const std::function<double(double)>& u0_tail) {
  const auto& cfg = run.config;
  ReportRow row;
  row.label = run.label;
  row.p = cfg.p;
  row.r = cfg.r;
  row.N = run.volume_dim;
  row.profile = cfg.profile;
  row.truncation_alarm = series.truncation_alarm;

  const auto [t_lo, t_hi] = plan.window_for(run);
  const auto fit = fit_decay_exponent(series, t_lo, t_hi);
  row.fitted_slope = fit.slope;
  row.slope_stderr = fit.std_error;

  const double mass0 = series.records.front().mass;
  row.mass_ratio = series.records.back().mass / mass0;
  row.decay = row.mass_ratio < plan.decay_threshold;

  const RateModel model{cfg.p, cfg.r, run.volume_dim, cfg.profile};
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  row.predicted_slope = row.env_ratio_max = row.env_ratio_min = row.env_ratio_final = nan;
  row.fitted_C = row.sup_ratio_max = row.sup_ratio_final = nan;
  if (plan.compare_envelope) {
    const double phi1 = phi(model, 1.0);
    const double a = std::max(t_lo, phi1);
    if (t_hi > a) {
      row.predicted_slope = std::log(mass_envelope_rate(model, t_hi) / mass_envelope_rate(model, a)) /
                            std::log(t_hi / a);
    }
    double e_max = -1.0, e_min = std::numeric_limits<double>::infinity(), e_last = nan;
    double s_max = -1.0, s_last = nan;
    for (const auto& rec : series.records) {
      if (rec.t < t_lo * (1.0 - 1e-12) || rec.t > t_hi * (1.0 + 1e-12) || rec.t < phi1) continue;
      const double e = rec.mass / mass_envelope(model, rec.t, u0_tail);
      e_max = std::max(e_max, e);
      e_min = std::min(e_min, e);
      e_last = e;
      if (rec.mass > 0.0) {
        const double s = rec.sup / sup_envelope(model, rec.t, rec.mass);
        s_max = std::max(s_max, s);
        s_last = s;
      }
    }
    if (e_max >= 0.0) {
      row.env_ratio_max = row.fitted_C = e_max;
      row.env_ratio_min = e_min;
      row.env_ratio_final = e_last;
    }
    if (s_max >= 0.0) {
      row.sup_ratio_max = s_max;
      row.sup_ratio_final = s_last;
    }
  }

  if (cfg.profile.kind == AbsorptionProfile::Kind::constant && row.decay) {
    const double r_star = critical_exponent(cfg.p, run.volume_dim, 0.0, CriticalMode::fujita_q1);
    if (cfg.r >= r_star) {
      row.finding = "decay verdict at r = " + csv::real(cfg.r) + " >= r* = " + csv::real(r_star);
    }
  }
  return row;
}

namespace {

ReportRow execute(const RunSpec& run, const ExperimentPlan& plan, const RunOptions& options) {
  try {
    const auto g = make_graph(run.config.graph);
    const auto u0 = make_initial(g, run.initial);
    const auto series = plap::run(g, run.config, u0);
    if (options.write_files) write_series_csv(plan.output_dir / (run.label + ".csv"), series);
    return evaluate_series(run, plan, series, tail_mass(g, u0));
  } catch (const std::exception& e) {
    ReportRow row;
    row.label = run.label;
    row.p = run.config.p;
    row.r = run.config.r;
    row.N = run.volume_dim;
    row.profile = run.config.profile;
    row.error = e.what();
    return row;
  }
}

}  // namespace

std::vector<ReportRow> run_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  std::vector<ReportRow> rows(plan.runs.size());
  if (options.write_files) std::filesystem::create_directories(plan.output_dir);

  const int requested = options.workers > 0 ? options.workers : plan.workers;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, requested)), plan.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.runs.size(); i = next++) rows[i] = execute(plan.runs[i], plan, options);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (options.write_files) {
    std::ofstream out(plan.output_dir / "summary.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write summary.csv in " + plan.output_dir.string());
    write_summary_csv(out, rows);
  }
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "label,p,r,N,profile,alpha,beta,fitted_slope,slope_stderr,predicted_slope,"
         "env_ratio_max,env_ratio_min,env_ratio_final,fitted_C,sup_ratio_max,sup_ratio_final,"
         "mass_ratio,verdict,truncation_alarm,finding,error\n";
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  for (const auto& row : rows) {
    const bool failed = !row.error.empty();
    auto num = [&](double v) { return failed ? std::string() : csv::real(v); };
    out << row.label << ',' << csv::real(row.p) << ',' << csv::real(row.r) << ',' << row.N << ','
        << to_string(row.profile.kind) << ',' << csv::real(row.profile.decay_exponent()) << ','
        << csv::real(row.profile.log_exponent()) << ',' << num(row.fitted_slope) << ','
        << num(row.slope_stderr) << ',' << num(row.predicted_slope) << ',' << num(row.env_ratio_max)
        << ',' << num(row.env_ratio_min) << ',' << num(row.env_ratio_final) << ','
        << num(row.fitted_C) << ',' << num(row.sup_ratio_max) << ',' << num(row.sup_ratio_final)
        << ',' << num(row.mass_ratio) << ','
        << (failed ? "error" : row.decay ? "decay" : "no-decay") << ','
        << (failed ? "" : row.truncation_alarm ? "1" : "0") << ',' << clean(row.finding) << ','
        << clean(row.error) << '\n';
  }
}

void theory_report(std::ostream& out, const RateModel& model, const std::vector<double>& t_list) {
  model.validate();
  const double phi1 = phi(model, 1.0);
  for (double t : t_list) {
    if (!(t >= phi1)) {
      throw std::invalid_argument("theory_report: t = " + csv::real(t) + " is below Phi(1) = " +
                                  csv::real(phi1));
    }
  }
  const double alpha = model.profile.decay_exponent();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double r_q1 = critical_exponent(model.p, model.N, 0.0, CriticalMode::fujita_q1);
  const double r_power =
      alpha < model.p ? critical_exponent(model.p, model.N, alpha, CriticalMode::fujita_power) : nan;
  const double r_alpha = critical_exponent(model.p, model.N, 0.0, CriticalMode::alpha_eq_r);

  out << "t,R_tilde,mass_rate,sup_envelope,rstar_fujita_q1,rstar_fujita_power,rstar_alpha_eq_r,"
         "lambda,H,gamma\n";
  for (double t : t_list) {
    out << csv::real(t) << ',' << csv::real(phi_inverse(model, t)) << ','
        << csv::real(mass_envelope_rate(model, t)) << ',' << csv::real(sup_envelope(model, t, 1.0))
        << ',' << csv::real(r_q1) << ',' << csv::real(r_power) << ',' << csv::real(r_alpha) << ','
        << csv::real(model.lambda()) << ',' << csv::real(model.H()) << ','
        << csv::real(model.gamma()) << '\n';
  }
}

}  // namespace plap
