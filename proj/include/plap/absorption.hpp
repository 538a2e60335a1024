#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "plap/graph.hpp"

namespace plap {

/// Radial absorption density q(s), s = distance to the root.
///
///   constant   q(s) = c
///   power      q(s) = max(s, 1)^-alpha
///   power_log  q(s) = max(s, e)^-alpha * log(max(s, e))^beta
///
/// The clamp below the pivot keeps q positive and finite on all of s >= 0.
/// alpha1 <= alpha2 bound the admissible decay: q(s) s^alpha2 nondecreasing,
/// q(s) s^alpha1 nonincreasing.
struct AbsorptionProfile {
  enum class Kind { constant, power, power_log };

  Kind kind = Kind::constant;
  double c = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  static AbsorptionProfile constant(double c = 1.0) { return {Kind::constant, c, 0.0, 0.0, 0.0, 0.0}; }
  static AbsorptionProfile power(double alpha) { return {Kind::power, 1.0, alpha, 0.0, alpha, alpha}; }
  static AbsorptionProfile power_log(double alpha, double beta) {
    return {Kind::power_log, 1.0, alpha, beta, 0.0, alpha};
  }

  /// Decay exponent seen by the rate formulas (0 for the constant family).
  double decay_exponent() const { return kind == Kind::constant ? 0.0 : alpha; }
  double log_exponent() const { return kind == Kind::power_log ? beta : 0.0; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

std::string to_string(AbsorptionProfile::Kind kind);
AbsorptionProfile::Kind parse_kind(const std::string& name);

template <typename Scalar>
Scalar q_eval(const AbsorptionProfile& profile, Scalar s) {
  using std::log;
  using std::max;
  using std::pow;
  switch (profile.kind) {
    case AbsorptionProfile::Kind::constant:
      return Scalar(profile.c);
    case AbsorptionProfile::Kind::power:
      return pow(max(s, Scalar(1)), Scalar(-profile.alpha));
    case AbsorptionProfile::Kind::power_log: {
      const Scalar x = max(s, Scalar(std::numbers::e_v<long double>));
      return pow(x, Scalar(-profile.alpha)) * pow(log(x), Scalar(profile.beta));
    }
  }
  return Scalar(profile.c);
}

/// True iff q(s) s^alpha2 is nondecreasing and q(s) s^alpha1 nonincreasing
/// over the integers 1..s_max (relative slack 1e-12 for rounding).
bool validate_monotonicity(const AbsorptionProfile& profile, int s_max);

/// q(d(x, root)) for every vertex.
Eigen::VectorXd absorption_density(const WeightedGraph& g, const AbsorptionProfile& profile);

}  // namespace plap
