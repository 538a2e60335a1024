#include "plap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace plap {

ScalarField make_initial(const WeightedGraph& g, const InitialData& initial) {
  ScalarField u = ScalarField::Zero(g.size());
  switch (initial.kind) {
    case InitialData::Kind::delta:
      if (!(initial.mass > 0.0)) throw std::invalid_argument("initial mass must be > 0");
      u[g.root()] = initial.mass / g.measure(g.root());
      break;
    case InitialData::Kind::box: {
      if (!(initial.mass > 0.0)) throw std::invalid_argument("initial mass must be > 0");
      if (initial.radius < 0 || initial.radius > g.truncation_radius()) {
        throw std::invalid_argument("box radius must lie within the truncation");
      }
      const double volume = ball_volume(g, initial.radius);
      for (Index x = 0; x < g.size() && g.depth(x) <= initial.radius; ++x) u[x] = initial.mass / volume;
      break;
    }
    case InitialData::Kind::file: {
      std::ifstream in(initial.file);
      if (!in) throw std::invalid_argument("cannot open initial data " + initial.file.string());
      const auto dim = g.coordinates().cols();
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        Index x = 0;
        bool ok = true;
        if (dim > 0) {
          std::vector<int> point(static_cast<std::size_t>(dim));
          for (auto& c : point) ok = ok && static_cast<bool>(ss >> c);
          if (ok) x = g.index_of_point(point);
        } else {
          std::int64_t label = 0;
          ok = static_cast<bool>(ss >> label);
          if (ok) x = g.index_of(label);
        }
        double value = 0.0;
        if (!ok || !(ss >> value) || !std::isfinite(value) || value < 0.0) {
          throw std::invalid_argument(initial.file.string() + ":" + std::to_string(line_no) +
                                      ": expected vertex and a nonnegative value");
        }
        u[x] = value;
      }
      break;
    }
  }
  return u;
}

std::pair<double, double> ExperimentPlan::window_for(const RunSpec& run) const {
  if (fit_window) return *fit_window;
  return {run.config.t_end / 10.0, run.config.t_end};
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& what) const {
    const auto mark = node.Mark();
    const int line = mark.is_null() ? 0 : mark.line + 1;
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + what);
  }

  void allow(const YAML::Node& map, const std::string& where, std::set<std::string> keys) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (!keys.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  double real(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key + " must be a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, key + " must be a number, got '" + node.Scalar() + "'");
    }
  }

  int integer(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key + " must be an integer");
    try {
      return node.as<int>();
    } catch (const YAML::Exception&) {
      fail(node, key + " must be an integer, got '" + node.Scalar() + "'");
    }
  }

  double real_or(const YAML::Node& map, const char* key, const std::string& path, double fallback) const {
    const auto node = map[key];
    return node ? real(node, path + "." + key) : fallback;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

/// One sweepable key: its values, each with the node it came from.
struct Axis {
  std::string key;
  std::string short_name;
  std::vector<double> values;
  std::vector<YAML::Node> nodes;
};

Axis read_axis(const Reader& reader, const YAML::Node& node, const std::string& key,
               std::string short_name, bool allow_auto = false) {
  Axis axis{key, std::move(short_name), {}, {}};
  auto one = [&](const YAML::Node& n) {
    if (allow_auto && n.IsScalar() && n.Scalar() == "auto") {
      axis.values.push_back(-1.0);
    } else {
      axis.values.push_back(reader.real(n, key));
    }
    axis.nodes.push_back(n);
  };
  if (node.IsSequence()) {
    for (const auto& n : node) one(n);
  } else {
    one(node);
  }
  return axis;
}

std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

AbsorptionProfile read_profile(const Reader& reader, const YAML::Node& node) {
  AbsorptionProfile profile;
  if (!node) return profile;
  reader.allow(node, "absorption", {"kind", "c", "alpha", "beta", "alpha1", "alpha2"});
  if (node["kind"]) {
    try {
      profile.kind = parse_kind(node["kind"].as<std::string>());
    } catch (const std::invalid_argument& e) {
      reader.fail(node["kind"], e.what());
    }
  }
  return profile;
}

void finish_profile(AbsorptionProfile& profile, const Reader& reader, const YAML::Node& node) {
  // Default monotonicity window is the tight one for each family.
  const double alpha = profile.kind == AbsorptionProfile::Kind::constant ? 0.0 : profile.alpha;
  profile.alpha1 = reader.real_or(node, "alpha1", "absorption",
                                  profile.kind == AbsorptionProfile::Kind::power ? alpha : 0.0);
  profile.alpha2 = reader.real_or(node, "alpha2", "absorption", alpha);
}

}  // namespace

ExperimentPlan parse_config_text(const std::string& text, const std::string& source_name,
                                 const std::filesystem::path& base_dir) {
  Reader reader(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  ExperimentPlan plan;
  if (root.IsNull()) return plan;
  reader.allow(root, "plan", {"output_dir", "workers", "graph", "equation", "absorption", "initial",
                              "time", "samples", "analysis"});

  if (root["output_dir"]) {
    const std::filesystem::path out = root["output_dir"].as<std::string>();
    plan.output_dir = out.is_absolute() ? out : base_dir / out;
  }
  if (root["workers"]) {
    plan.workers = reader.integer(root["workers"], "workers");
    if (plan.workers < 1) reader.fail(root["workers"], "workers must be >= 1");
  }

  // graph
  const auto graph = root["graph"];
  if (!graph) reader.fail(root, "missing 'graph' section");
  reader.allow(graph, "graph", {"lattice", "edge_list", "isolated", "volume_dim"});
  const int sources = (graph["lattice"] ? 1 : 0) + (graph["edge_list"] ? 1 : 0) + (graph["isolated"] ? 1 : 0);
  if (sources != 1) reader.fail(graph, "graph needs exactly one of lattice, edge_list, isolated");

  std::vector<Axis> axes;
  const auto equation = root["equation"];
  if (!equation) reader.fail(root, "missing 'equation' section");
  reader.allow(equation, "equation", {"p", "r"});
  if (!equation["p"] || !equation["r"]) reader.fail(equation, "equation needs p and r");
  axes.push_back(read_axis(reader, equation["p"], "equation.p", "p"));
  axes.push_back(read_axis(reader, equation["r"], "equation.r", "r"));

  const auto absorption = root["absorption"];
  const AbsorptionProfile base_profile = read_profile(reader, absorption);
  if (absorption) {
    if (absorption["c"]) axes.push_back(read_axis(reader, absorption["c"], "absorption.c", "c"));
    if (absorption["alpha"]) axes.push_back(read_axis(reader, absorption["alpha"], "absorption.alpha", "alpha"));
    if (absorption["beta"]) axes.push_back(read_axis(reader, absorption["beta"], "absorption.beta", "beta"));
  }

  GraphSource base_source;
  double radius_factor = 8.0;
  std::optional<int> volume_dim;
  if (graph["volume_dim"]) volume_dim = reader.integer(graph["volume_dim"], "graph.volume_dim");
  if (const auto lattice = graph["lattice"]) {
    reader.allow(lattice, "graph.lattice", {"dim", "radius", "weight", "radius_factor", "max_vertices"});
    if (!lattice["dim"] || !lattice["radius"]) reader.fail(lattice, "lattice needs dim and radius");
    LatticeSpec spec;
    spec.weight = reader.real_or(lattice, "weight", "graph.lattice", 1.0);
    if (lattice["max_vertices"]) {
      spec.max_vertices = static_cast<std::size_t>(reader.real(lattice["max_vertices"], "graph.lattice.max_vertices"));
    }
    radius_factor = reader.real_or(lattice, "radius_factor", "graph.lattice", radius_factor);
    base_source = spec;
    axes.push_back(read_axis(reader, lattice["dim"], "graph.lattice.dim", "dim"));
    axes.push_back(read_axis(reader, lattice["radius"], "graph.lattice.radius", "R", true));
  } else if (graph["edge_list"]) {
    const std::filesystem::path path = graph["edge_list"].as<std::string>();
    base_source = path.is_absolute() ? path : base_dir / path;
    if (!volume_dim) reader.fail(graph, "edge_list graphs need graph.volume_dim");
  } else {
    base_source = IsolatedVertex{};
    if (!volume_dim) volume_dim = 1;
  }

  InitialData initial;
  if (const auto node = root["initial"]) {
    reader.allow(node, "initial", {"kind", "mass", "radius", "file"});
    const auto kind = node["kind"] ? node["kind"].as<std::string>() : "delta";
    if (kind == "delta") {
      initial.kind = InitialData::Kind::delta;
    } else if (kind == "box") {
      initial.kind = InitialData::Kind::box;
    } else if (kind == "file") {
      initial.kind = InitialData::Kind::file;
      if (!node["file"]) reader.fail(node, "file initial data needs initial.file");
      const std::filesystem::path f = node["file"].as<std::string>();
      initial.file = f.is_absolute() ? f : base_dir / f;
    } else {
      reader.fail(node["kind"], "unknown initial kind '" + kind + "' (expected delta, box or file)");
    }
    initial.mass = reader.real_or(node, "mass", "initial", 1.0);
    if (node["radius"]) initial.radius = reader.integer(node["radius"], "initial.radius");
    if (!(initial.mass > 0.0)) reader.fail(node, "initial.mass must be > 0");
  }

  SimConfig base;
  base.profile = base_profile;
  base.graph = base_source;
  const auto time = root["time"];
  if (!time) reader.fail(root, "missing 'time' section");
  reader.allow(time, "time", {"t_end", "dt_init", "dt_safety", "dt_max", "dt_floor", "grow_after",
                              "rel_step_cap", "positivity_eps"});
  if (!time["t_end"]) reader.fail(time, "time needs t_end");
  base.t_end = reader.real(time["t_end"], "time.t_end");
  base.dt_init = reader.real_or(time, "dt_init", "time", base.dt_init);
  base.dt_safety = reader.real_or(time, "dt_safety", "time", base.dt_safety);
  base.dt_max = reader.real_or(time, "dt_max", "time", base.dt_max);
  base.dt_floor = reader.real_or(time, "dt_floor", "time", base.dt_floor);
  if (time["grow_after"]) base.grow_after = reader.integer(time["grow_after"], "time.grow_after");
  base.tolerances.rel_step_cap = reader.real_or(time, "rel_step_cap", "time", base.tolerances.rel_step_cap);
  base.tolerances.positivity_eps =
      reader.real_or(time, "positivity_eps", "time", base.tolerances.positivity_eps);

  if (const auto samples = root["samples"]) {
    reader.allow(samples, "samples", {"t_first", "ratio", "per_decade", "count"});
    base.output.t_first = reader.real_or(samples, "t_first", "samples", base.output.t_first);
    if (samples["ratio"] && samples["per_decade"]) reader.fail(samples, "give either ratio or per_decade");
    base.output.ratio = reader.real_or(samples, "ratio", "samples", base.output.ratio);
    if (samples["per_decade"]) {
      const double k = reader.real(samples["per_decade"], "samples.per_decade");
      if (!(k > 0.0)) reader.fail(samples["per_decade"], "per_decade must be > 0");
      base.output.ratio = std::pow(10.0, 1.0 / k);
    }
    if (samples["count"]) base.output.count = reader.integer(samples["count"], "samples.count");
  }

  YAML::Node window_node;
  if (const auto analysis = root["analysis"]) {
    reader.allow(analysis, "analysis", {"fit_window", "envelope", "decay_threshold", "flux_alarm"});
    if (analysis["fit_window"]) {
      window_node = analysis["fit_window"];
      if (!window_node.IsSequence() || window_node.size() != 2) {
        reader.fail(window_node, "fit_window must be [t_lo, t_hi]");
      }
      plan.fit_window = std::pair{reader.real(window_node[0], "fit_window"),
                                  reader.real(window_node[1], "fit_window")};
    }
    if (analysis["envelope"]) plan.compare_envelope = analysis["envelope"].as<bool>();
    plan.decay_threshold = reader.real_or(analysis, "decay_threshold", "analysis", plan.decay_threshold);
    base.flux_alarm_fraction = reader.real_or(analysis, "flux_alarm", "analysis", base.flux_alarm_fraction);
  }

  // Cartesian product, last axis varying fastest.
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.values.size();
  std::vector<std::size_t> pick(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rest = n;
    for (std::size_t a = axes.size(); a-- > 0;) {
      pick[a] = rest % axes[a].values.size();
      rest /= axes[a].values.size();
    }
    RunSpec run;
    run.config = base;
    run.initial = initial;
    std::string label;
    auto value_of = [&](const std::string& key) -> std::pair<double, const YAML::Node*> {
      for (std::size_t a = 0; a < axes.size(); ++a) {
        if (axes[a].key == key) return {axes[a].values[pick[a]], &axes[a].nodes[pick[a]]};
      }
      return {0.0, nullptr};
    };
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& axis = axes[a];
      if (axis.key != "equation.p" && axis.key != "equation.r" && axis.values.size() == 1) continue;
      const double v = axis.values[pick[a]];
      label += (label.empty() ? "" : "_") + axis.short_name + (v < 0.0 && axis.short_name == "R" ? std::string("auto") : compact(v));
    }
    run.label = label;

    const auto [p, p_node] = value_of("equation.p");
    const auto [r, r_node] = value_of("equation.r");
    run.config.p = p;
    run.config.r = r;
    try {
      check_exponent_window(p, r);
    } catch (const std::invalid_argument& e) {
      reader.fail(p < 2.0 ? *p_node : *r_node, std::string("run ") + label + ": " + e.what());
    }
    if (auto [c, node] = value_of("absorption.c"); node) run.config.profile.c = c;
    if (auto [alpha, node] = value_of("absorption.alpha"); node) run.config.profile.alpha = alpha;
    if (auto [beta, node] = value_of("absorption.beta"); node) run.config.profile.beta = beta;
    finish_profile(run.config.profile, reader, absorption);
    try {
      run.config.profile.validate();
    } catch (const std::invalid_argument& e) {
      reader.fail(absorption, std::string("run ") + label + ": " + e.what());
    }

    if (auto* spec = std::get_if<LatticeSpec>(&run.config.graph)) {
      const auto [dim, dim_node] = value_of("graph.lattice.dim");
      const auto [radius, radius_node] = value_of("graph.lattice.radius");
      if (dim < 1 || dim != std::floor(dim)) reader.fail(*dim_node, "lattice dim must be an integer >= 1");
      spec->dim = static_cast<int>(dim);
      if (radius < 0.0) {
        double sup0 = initial.mass / (2.0 * spec->dim * spec->weight);
        if (initial.kind == InitialData::Kind::box) {
          sup0 = initial.mass / (static_cast<double>(l1_ball_count(spec->dim, initial.radius)) *
                                 2.0 * spec->dim * spec->weight);
        }
        spec->radius = suggest_lattice_radius(p, base.t_end, sup0, radius_factor);
      } else {
        if (radius < 1 || radius != std::floor(radius)) {
          reader.fail(*radius_node, "lattice radius must be an integer >= 1 or 'auto'");
        }
        spec->radius = static_cast<int>(radius);
      }
      run.volume_dim = volume_dim.value_or(spec->dim);
    } else {
      run.volume_dim = *volume_dim;
    }

    try {
      run.config.validate();
    } catch (const std::invalid_argument& e) {
      reader.fail(time, std::string("run ") + label + ": " + e.what());
    }
    const auto [t_lo, t_hi] = plan.window_for(run);
    if (!(t_lo > 0.0 && t_lo < t_hi && t_hi <= run.config.t_end)) {
      reader.fail(window_node ? window_node : time,
                  "run " + label + ": fit window needs 0 < t_lo < t_hi <= t_end");
    }
    plan.runs.push_back(std::move(run));
  }

  std::set<std::string> labels;
  for (const auto& run : plan.runs) {
    if (!labels.insert(run.label).second) reader.fail(root, "duplicate run label " + run.label);
  }
  return plan;
}

ExperimentPlan parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open plan");
  std::stringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string(), path.parent_path());
}

RateModel parse_rate_model_text(const std::string& text, const std::string& source_name) {
  Reader reader(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  reader.allow(root, "model", {"p", "r", "N", "absorption"});
  if (!root["p"] || !root["r"] || !root["N"]) reader.fail(root, "model needs p, r and N");
  RateModel model;
  model.p = reader.real(root["p"], "p");
  model.r = reader.real(root["r"], "r");
  model.N = reader.integer(root["N"], "N");
  const auto absorption = root["absorption"];
  model.profile = read_profile(reader, absorption);
  if (absorption) {
    model.profile.c = reader.real_or(absorption, "c", "absorption", 1.0);
    model.profile.alpha = reader.real_or(absorption, "alpha", "absorption", 0.0);
    model.profile.beta = reader.real_or(absorption, "beta", "absorption", 0.0);
  }
  finish_profile(model.profile, reader, absorption);
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    reader.fail(root, e.what());
  }
  return model;
}

RateModel parse_rate_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open model");
  std::stringstream text;
  text << in.rdbuf();
  return parse_rate_model_text(text.str(), path.string());
}

}  // namespace plap
