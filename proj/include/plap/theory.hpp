#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "plap/absorption.hpp"
#include "plap/integrator.hpp"

namespace plap {

/// Exponents, dimension and absorption profile behind the decay rates.
struct RateModel {
  double p = 2.0;
  double r = 2.0;
  int N = 1;
  AbsorptionProfile profile;

  /// r + 1 - p, positive in the admissible window.
  double excess() const { return r + 1.0 - p; }
  /// lambda = N (p - 2) + p
  double lambda() const { return N * (p - 2.0) + p; }
  /// H = p (r - 1) - alpha (p - 2); alpha = 0 for constant q.
  double H() const { return p * (r - 1.0) - profile.decay_exponent() * (p - 2.0); }
  /// Log-correction exponent of the mass rate for the power-log family
  /// (0 for the other families).
  double gamma() const;

  /// Throws std::invalid_argument when the window, lambda > 0 or sampled
  /// monotonicity of phi fails.
  void validate() const;
};

/// Phi(R) = R^(p(r-1)/(r+1-p)) q(R)^((p-2)/(r+1-p)), R >= 1.
double phi(const RateModel& model, double R);

/// Inverse of phi by doubling then bisection, to |phi(R) - t| <= 1e-10 t.
/// Throws std::invalid_argument for t < phi(1) and std::domain_error if the
/// bracketing meets a non-increasing phi.
double phi_inverse(const RateModel& model, double t);

/// R^N R^(-p/(r+1-p)) q(R)^(-1/(r+1-p)) at R = phi_inverse(t).
double mass_envelope_rate(const RateModel& model, double t);

/// Rate part plus the initial mass outside B(R(t)); constant normalised to 1.
double mass_envelope(const RateModel& model, double t,
                     const std::function<double(double)>& u0_tail);

/// t^(-N/lambda) M^(p/lambda); constant normalised to 1.
double sup_envelope(const RateModel& model, double t, double M);

enum class CriticalMode { fujita_q1, fujita_power, alpha_eq_r };

/// r* = p-1+p/N, p-1+(p-alpha)/N, or (N(p-1)+p)/(N+1). alpha must be 0 except
/// in fujita_power mode, where 0 <= alpha < p.
double critical_exponent(double p, int N, double alpha, CriticalMode mode);

std::string to_string(CriticalMode mode);

/// Values of u, v at the two endpoints x, y of an edge, plus the level h and
/// power theta of the truncation (u - v - h)_+^theta.
struct MonotonicitySample {
  double ux = 0.0;
  double uy = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double h = 0.0;
  double theta = 1.0;
};

struct MonotonicityTerms {
  /// (|D u|^(p-2) D u - |D v|^(p-2) D v) D (u - v - h)_+^theta
  double lhs = 0.0;
  /// |D (u - v - h)_+^((theta-1+p)/p)|^p
  double rhs = 0.0;
};

MonotonicityTerms monotonicity_terms(const MonotonicitySample& sample, double p);

/// lhs - C0 rhs; nonnegative whenever C0 is admissible.
double monotonicity_gap(const MonotonicitySample& sample, double p, double C0);

/// Scale-mixed Cauchy draws for u, v (so both tiny and huge differences
/// occur) and h that is 0 a quarter of the time.
MonotonicitySample draw_monotonicity_sample(std::mt19937_64& rng, double theta);

/// Infimum of lhs/rhs over n_samples seeded draws with rhs > 0.
/// Throws std::runtime_error if no draw has rhs > 0.
double find_C0(double p, double theta, std::size_t n_samples, std::uint64_t seed);

/// max_k |M(t_k) - M(0) + absorbed_cum(t_k) + flux_cum(t_k)| / M(0).
double dissipation_residual(const DecaySeries& series);

}  // namespace plap
