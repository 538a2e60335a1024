#include "plap/absorption.hpp"

#include <stdexcept>

namespace plap {

void AbsorptionProfile::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("absorption: " + what); };
  if (!std::isfinite(c) || !std::isfinite(alpha) || !std::isfinite(beta) ||
      !std::isfinite(alpha1) || !std::isfinite(alpha2)) {
    fail("parameters must be finite");
  }
  if (kind == Kind::constant && !(c >= 0.0)) fail("c must be >= 0");
  if (kind != Kind::constant && alpha < 0.0) fail("alpha must be >= 0");
  if (alpha1 < 0.0) fail("alpha1 must be >= 0");
  if (alpha1 > alpha2) fail("alpha1 <= alpha2 violated");
}

std::string to_string(AbsorptionProfile::Kind kind) {
  switch (kind) {
    case AbsorptionProfile::Kind::constant: return "constant";
    case AbsorptionProfile::Kind::power: return "power";
    case AbsorptionProfile::Kind::power_log: return "power_log";
  }
  return "constant";
}

AbsorptionProfile::Kind parse_kind(const std::string& name) {
  if (name == "constant") return AbsorptionProfile::Kind::constant;
  if (name == "power") return AbsorptionProfile::Kind::power;
  if (name == "power_log") return AbsorptionProfile::Kind::power_log;
  throw std::invalid_argument("unknown absorption kind '" + name +
                              "' (expected constant, power or power_log)");
}

bool validate_monotonicity(const AbsorptionProfile& profile, int s_max) {
  if (s_max < 2) throw std::invalid_argument("validate_monotonicity: s_max must be >= 2");
  constexpr double slack = 1e-12;
  double prev_hi = 0.0, prev_lo = 0.0;
  for (int s = 1; s <= s_max; ++s) {
    const double q = q_eval(profile, static_cast<double>(s));
    const double hi = q * std::pow(s, profile.alpha2);
    const double lo = q * std::pow(s, profile.alpha1);
    if (s > 1) {
      if (hi < prev_hi * (1.0 - slack)) return false;
      if (lo > prev_lo * (1.0 + slack)) return false;
    }
    prev_hi = hi;
    prev_lo = lo;
  }
  return true;
}

Eigen::VectorXd absorption_density(const WeightedGraph& g, const AbsorptionProfile& profile) {
  Eigen::VectorXd q(g.size());
  for (Index x = 0; x < g.size(); ++x) q[x] = q_eval(profile, static_cast<double>(g.depth(x)));
  return q;
}

}  // namespace plap
