// Command-line front end: run plans, tabulate theory, fit series, estimate C0.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plap/config.hpp"
#include "plap/csv.hpp"
#include "plap/fit.hpp"
#include "plap/harness.hpp"
#include "plap/theory.hpp"

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& cell : plap::csv::split(text, ',')) out.push_back(plap::csv::parse_real(cell, what));
  return out;
}

int cmd_run(const std::string& plan_file, bool keep_going, int workers) {
  const auto plan = plap::parse_config(plan_file);
  plap::RunOptions options;
  options.workers = workers;
  const auto rows = plap::run_experiment(plan, options);
  int failures = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      ++failures;
      std::cerr << row.label << ": " << row.error << '\n';
    } else {
      std::cout << row.label << ": " << (row.decay ? "decay" : "no-decay")
                << " slope=" << plap::csv::real(row.fitted_slope)
                << " predicted=" << plap::csv::real(row.predicted_slope)
                << (row.truncation_alarm ? " [truncation alarm]" : "")
                << (row.finding.empty() ? "" : " finding: " + row.finding) << '\n';
    }
  }
  std::cout << rows.size() << " run(s), summary in " << (plan.output_dir / "summary.csv").string() << '\n';
  return failures > 0 && !keep_going ? 1 : 0;
}

int cmd_theory(const std::string& model_file, const std::string& t_list, const std::string& out_file) {
  const auto model = plap::parse_rate_model(model_file);
  const auto ts = parse_list(t_list, "--t");
  if (out_file.empty() || out_file == "-") {
    plap::theory_report(std::cout, model, ts);
    return 0;
  }
  std::ostringstream buffer;
  plap::theory_report(buffer, model, ts);
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_file);
  out << buffer.str();
  return 0;
}

int cmd_fit(const std::string& series_file, const std::string& window) {
  const auto bounds = parse_list(window, "--window");
  if (bounds.size() != 2) throw std::runtime_error("--window expects a,b");
  const auto series = plap::read_series_csv(std::filesystem::path(series_file));
  const auto fit = plap::fit_decay_exponent(series, bounds[0], bounds[1]);
  std::cout << "slope,stderr,points\n"
            << plap::csv::real(fit.slope) << ',' << plap::csv::real(fit.std_error) << ','
            << fit.points << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass decay experiments for the graph p-Laplacian with absorption"};
  app.require_subcommand(1);

  std::string plan_file;
  bool keep_going = false;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run every config of a plan and write CSV reports");
  run->add_option("plan", plan_file, "YAML plan file")->required()->check(CLI::ExistingFile);
  run->add_flag("--keep-going", keep_going, "Exit 0 even if some runs failed");
  run->add_option("--workers", workers, "Worker threads (default: plan setting)");

  std::string model_file, t_list, theory_out;
  auto* theory = app.add_subcommand("theory", "Tabulate rate function, envelopes and critical exponents");
  theory->add_option("model", model_file, "YAML rate model")->required()->check(CLI::ExistingFile);
  theory->add_option("--t", t_list, "Comma-separated times")->required();
  theory->add_option("-o,--output", theory_out, "Output CSV (default stdout)");

  std::string series_file, window;
  auto* fit = app.add_subcommand("fit", "Fit the log-log mass decay slope of a series CSV");
  fit->add_option("series", series_file, "Series CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--window", window, "Fit window a,b")->required();

  double p = 2.0, theta = 1.0;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  auto* c0 = app.add_subcommand("c0", "Estimate an admissible constant for the monotonicity inequality");
  c0->add_option("--p", p, "Exponent p >= 2")->required();
  c0->add_option("--theta", theta, "Power theta > 0")->required();
  c0->add_option("--samples", samples, "Number of random samples");
  c0->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(plan_file, keep_going, workers);
    if (*theory) return cmd_theory(model_file, t_list, theory_out);
    if (*fit) return cmd_fit(series_file, window);
    if (*c0) {
      std::cout << plap::csv::real(plap::find_C0(p, theta, samples, seed)) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
