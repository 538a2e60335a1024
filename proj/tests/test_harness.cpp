#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "plap/harness.hpp"

using namespace plap;

namespace {

const char* kMinimal = R"(
graph:
  lattice: {dim: 1, radius: 40}
equation: {p: 2, r: 1.5}
time: {t_end: 100}
)";

DecaySeries synthetic(double (*mass)(double), double t_lo, double t_hi, int n) {
  DecaySeries series;
  series.records.push_back({0.0, 1.0, 1.0, 0.0, 0.0, 0.0});
  for (int k = 0; k < n; ++k) {
    const double t = t_lo * std::pow(t_hi / t_lo, k / (n - 1.0));
    series.records.push_back({t, mass(t), 1.0, 0.0, 0.0, 0.0});
  }
  return series;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("plap_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal plan") {
  const auto plan = parse_config_text(kMinimal, "minimal.yaml");
  REQUIRE(plan.runs.size() == 1);
  const auto& run = plan.runs.front();
  CHECK(run.label == "p2_r1.5");
  CHECK(run.config.p == 2.0);
  CHECK(run.config.r == 1.5);
  CHECK(run.volume_dim == 1);
  CHECK(std::get<LatticeSpec>(run.config.graph).radius == 40);
  CHECK(run.initial.kind == InitialData::Kind::delta);
  CHECK(plan.window_for(run) == std::pair{10.0, 100.0});
}

TEST_CASE("sweeps expand to the cartesian product") {
  const auto plan = parse_config_text(R"(
graph:
  lattice: {dim: [1, 2], radius: 10}
equation: {p: 2, r: [1.5, 2, 3]}
absorption: {kind: power, alpha: 0.5}
time: {t_end: 10}
)",
                                      "sweep.yaml");
  REQUIRE(plan.runs.size() == 6);
  CHECK(plan.runs[0].label == "p2_r1.5_dim1");
  CHECK(plan.runs[1].label == "p2_r1.5_dim2");
  CHECK(plan.runs[5].label == "p2_r3_dim2");
  CHECK(plan.runs[5].volume_dim == 2);
  for (const auto& run : plan.runs) {
    CHECK(run.config.profile.kind == AbsorptionProfile::Kind::power);
    CHECK(run.config.profile.alpha1 == 0.5);
    CHECK(run.config.profile.alpha2 == 0.5);
  }

  const auto three = parse_config_text(R"(
graph: {isolated: true}
equation: {p: 2, r: [1.5, 2, 3]}
time: {t_end: 1}
)",
                                       "three.yaml");
  CHECK(three.runs.size() == 3);
}

TEST_CASE("invalid plans are rejected with a location") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"(
graph: {isolated: true}
equation: {p: 3, r: 1.5}
time: {t_end: 1}
)",
                                         "bad.yaml"),
                       doctest::Contains("r+1-p"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"(
graph: {isolated: true}
equation: {p: 2, r: 2}
time: {t_end: 1, dt_nope: 3}
)",
                                         "typo.yaml"),
                       doctest::Contains("typo.yaml:4:"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"(
graph: {isolated: true}
equation: {p: 2, r: 2}
time: {t_end: 100}
analysis: {fit_window: [50, 500]}
)",
                                    "window.yaml"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("graph: {isolated: true}\nequation: {p: 2, r: 2}\n", "no_time.yaml"),
                  ConfigError);
}

TEST_CASE("empty plan gives an empty report") {
  const auto plan = parse_config_text("", "empty.yaml");
  CHECK(plan.runs.empty());
  CHECK(run_experiment(plan, {1, false}).empty());
  std::ostringstream out;
  write_summary_csv(out, {});
  std::istringstream in(out.str());
  CHECK(read_rows(in).size() == 1);
}

TEST_CASE("rate model files") {
  const auto model = parse_rate_model_text("p: 3\nr: 3\nN: 2\nabsorption: {kind: power_log, alpha: 1, beta: 2}\n",
                                           "model.yaml");
  CHECK(model.N == 2);
  CHECK(model.profile.kind == AbsorptionProfile::Kind::power_log);
  CHECK(model.gamma() == doctest::Approx(-2.0));
  CHECK_THROWS_WITH_AS(parse_rate_model_text("p: 3\nr: 1.5\nN: 1\n", "m.yaml"), doctest::Contains("r+1-p"),
                       ConfigError);
}

TEST_CASE("log-log fits") {
  const auto exact = synthetic([](double t) { return std::pow(t, -1.5); }, 1.0, 100.0, 12);
  const auto f = fit_decay_exponent(exact, 1.0, 100.0);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(f.std_error <= 1e-12);
  CHECK(f.points == 12);

  const auto flat = synthetic([](double) { return 7.0; }, 1.0, 100.0, 8);
  CHECK(std::abs(fit_decay_exponent(flat, 1.0, 100.0).slope) <= 1e-12);

  const auto wobbly =
      synthetic([](double t) { return (1.0 + 0.01 * std::sin(std::log(t))) / t; }, 1.0, 1e4, 40);
  CHECK(std::abs(fit_decay_exponent(wobbly, 1.0, 1e4).slope + 1.0) <= 0.02);

  CHECK_THROWS_AS(fit_decay_exponent(exact, 50.0, 60.0), std::invalid_argument);
  auto broken = exact;
  broken.records[5].mass = 0.0;
  CHECK_THROWS_AS(fit_decay_exponent(broken, 1.0, 100.0), std::invalid_argument);
}

TEST_CASE("theory report") {
  std::ostringstream out;
  theory_report(out, RateModel{2.0, 2.0, 1, AbsorptionProfile::constant(1.0)}, {100.0, 400.0});
  std::istringstream in(out.str());
  const auto rows = read_rows(in);
  REQUIRE(rows.size() == 3);
  CHECK(out.str().rfind("t,R_tilde,mass_rate,sup_envelope,rstar_fujita_q1,rstar_fujita_power,"
                        "rstar_alpha_eq_r,lambda,H,gamma\n",
                        0) == 0);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(std::stod(rows[2][1]) == doctest::Approx(20.0).epsilon(1e-10));
  CHECK(std::stod(rows[1][4]) == 3.0);
  CHECK(std::stod(rows[1][6]) == 1.5);

  for (int N : {1, 2, 3}) {
    std::ostringstream o;
    const RateModel m{3.0, 3.0, N, AbsorptionProfile::power_log(1.0, 2.0)};
    theory_report(o, m, {1e3});
    std::istringstream i(o.str());
    const auto r = read_rows(i);
    const double gamma = 2.0 * (-(1.0) * (N + 1.0 - 3.0) / (5.0 * 1.0) - 1.0);
    CHECK(std::stod(r[1][9]) == doctest::Approx(gamma));
    CHECK(std::stod(r[1][8]) == 5.0);
  }
  for (int N : {1, 2, 7}) {
    std::ostringstream o;
    theory_report(o, RateModel{2.0, 2.5, N, AbsorptionProfile::constant(1.0)}, {10.0});
    std::istringstream i(o.str());
    CHECK(std::stod(read_rows(i)[1][7]) == 2.0);
  }

  std::ostringstream sink;
  CHECK_THROWS_AS(theory_report(sink, RateModel{3.0, 3.0, 1, AbsorptionProfile::constant(2.0)}, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("tail mass") {
  const auto g = build_lattice({1, 3, 1.0});
  const auto tail = tail_mass(g, ScalarField::Ones(g.size()));
  CHECK(tail(-1.0) == 14.0);
  CHECK(tail(0.0) == 12.0);
  CHECK(tail(2.5) == 4.0);
  CHECK(tail(3.0) == 0.0);
  CHECK(tail(50.0) == 0.0);
}

TEST_CASE("decay verdicts contradicting the critical exponent are flagged") {
  RunSpec run;
  run.label = "synthetic";
  run.config.p = 2.0;
  run.config.r = 4.0;
  run.config.t_end = 100.0;
  run.volume_dim = 1;
  ExperimentPlan plan;
  plan.compare_envelope = false;
  const auto series = synthetic([](double t) { return 1.0 / t; }, 1.0, 100.0, 10);
  const auto row = evaluate_series(run, plan, series, {});
  CHECK(row.decay);
  CHECK(row.finding.find("r* = 3") != std::string::npos);

  run.config.r = 2.5;
  CHECK(evaluate_series(run, plan, series, {}).finding.empty());
}

TEST_CASE("small sweep: verdicts, failures and determinism") {
  const auto dir = scratch("sweep");
  auto plan = parse_config_text(R"(
workers: 2
graph:
  lattice: {dim: 1, radius: 60}
equation: {p: 2, r: [1.5, 4]}
time: {t_end: 300, dt_max: 0.25}
samples: {t_first: 1, per_decade: 10}
)",
                                "small.yaml", dir);
  plan.output_dir = dir / "a";
  auto broken = plan.runs.front();
  broken.label = "missing_graph";
  broken.config.graph = std::filesystem::path(dir / "nope.edges");
  plan.runs.push_back(broken);

  const auto rows = run_experiment(plan, {1, true});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].label == "p2_r1.5");
  CHECK(rows[0].error.empty());
  CHECK(rows[0].decay);
  CHECK(rows[0].fitted_slope < -1.0);
  CHECK(rows[0].finding.empty());
  CHECK(rows[1].error.empty());
  CHECK_FALSE(rows[1].decay);
  CHECK(rows[1].mass_ratio > 0.5);
  CHECK_FALSE(rows[2].error.empty());

  plan.output_dir = dir / "b";
  const auto again = run_experiment(plan, {3, true});
  for (const auto* name : {"p2_r1.5.csv", "p2_r4.csv", "summary.csv"}) {
    const auto a = slurp(dir / "a" / name);
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / name));
  }
  CHECK_FALSE(std::filesystem::exists(dir / "a" / "missing_graph.csv"));

  std::ifstream summary(dir / "a" / "summary.csv");
  const auto table = read_rows(summary);
  REQUIRE(table.size() == 4);
  CHECK(table[0].size() == 21);
  CHECK(table[0][17] == "verdict");
  CHECK(table[1][17] == "decay");
  CHECK(table[2][17] == "no-decay");
  CHECK(table[3][17] == "error");
  for (const auto& row : table) CHECK(row.size() == 21);

  const auto series = read_series_csv(dir / "a" / "p2_r1.5.csv");
  CHECK(series.records.front().t == 0.0);
  CHECK(series.records.back().t == 300.0);
  CHECK(dissipation_residual(series) <= 1e-10);
  std::filesystem::remove_all(dir);
}

TEST_CASE("analysis section without a fit window") {
  const auto plan = parse_config_text(R"(
graph: {isolated: true}
equation: {p: 2, r: 2}
time: {t_end: 10}
analysis: {envelope: false, decay_threshold: 0.1}
)",
                                      "analysis.yaml");
  CHECK_FALSE(plan.fit_window);
  CHECK_FALSE(plan.compare_envelope);
  CHECK(plan.decay_threshold == 0.1);
}
