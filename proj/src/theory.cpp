#include "plap/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace plap {

double RateModel::gamma() const {
  if (profile.kind != AbsorptionProfile::Kind::power_log) return 0.0;
  const double alpha = profile.alpha;
  return profile.beta * (-(p - 2.0) * (N + alpha - p) / (H() * excess()) - 1.0 / excess());
}

void RateModel::validate() const {
  check_exponent_window(p, r);
  profile.validate();
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(lambda() > 0.0)) throw std::invalid_argument("lambda = N(p-2)+p must be > 0");
  double prev = phi(*this, 1.0);
  for (double R = 1.05; R <= 1e6; R *= 1.05) {
    const double value = phi(*this, R);
    if (!(value > prev)) {
      throw std::invalid_argument("Phi is not increasing near R = " + std::to_string(R));
    }
    prev = value;
  }
}

double phi(const RateModel& model, double R) {
  if (!(R >= 1.0)) throw std::invalid_argument("phi: R must be >= 1");
  const double e = model.excess();
  const double q = q_eval(model.profile, R);
  return std::pow(R, model.p * (model.r - 1.0) / e) * std::pow(q, (model.p - 2.0) / e);
}

double phi_inverse(const RateModel& model, double t) {
  const double phi1 = phi(model, 1.0);
  if (!(t >= phi1)) {
    throw std::invalid_argument("phi_inverse: t = " + std::to_string(t) + " is below Phi(1) = " +
                                std::to_string(phi1));
  }
  if (t == phi1) return 1.0;

  double lo = 1.0, hi = 2.0;
  double phi_lo = phi1;
  for (;;) {
    const double phi_hi = phi(model, hi);
    if (!(phi_hi > phi_lo)) {
      throw std::domain_error("phi_inverse: Phi is not increasing on [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
    }
    if (phi_hi >= t) break;
    lo = hi;
    phi_lo = phi_hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("phi_inverse: no bracket for t");
  }

  for (int iter = 0; iter < 200 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (phi(model, mid) < t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(phi(model, lo) - t) <= std::abs(phi(model, hi) - t) ? lo : hi;
}

double mass_envelope_rate(const RateModel& model, double t) {
  const double R = phi_inverse(model, t);
  const double e = model.excess();
  return std::pow(R, model.N - model.p / e) * std::pow(q_eval(model.profile, R), -1.0 / e);
}

double mass_envelope(const RateModel& model, double t,
                     const std::function<double(double)>& u0_tail) {
  const double rate = mass_envelope_rate(model, t);
  return u0_tail ? rate + u0_tail(phi_inverse(model, t)) : rate;
}

double sup_envelope(const RateModel& model, double t, double M) {
  if (!(t > 0.0)) throw std::invalid_argument("sup_envelope: t must be > 0");
  const double lambda = model.lambda();
  return std::pow(t, -model.N / lambda) * std::pow(M, model.p / lambda);
}

double critical_exponent(double p, int N, double alpha, CriticalMode mode) {
  if (N < 1) throw std::invalid_argument("critical_exponent: N must be >= 1");
  switch (mode) {
    case CriticalMode::fujita_q1:
      if (alpha != 0.0) throw std::invalid_argument("fujita_q1 takes no alpha (q = 1)");
      return p - 1.0 + p / N;
    case CriticalMode::fujita_power:
      if (!(alpha >= 0.0 && alpha < p)) {
        throw std::invalid_argument("fujita_power needs 0 <= alpha < p");
      }
      return p - 1.0 + (p - alpha) / N;
    case CriticalMode::alpha_eq_r:
      if (alpha != 0.0) throw std::invalid_argument("alpha_eq_r fixes alpha = r; pass alpha = 0");
      return (N * (p - 1.0) + p) / (N + 1.0);
  }
  throw std::invalid_argument("unknown critical exponent mode");
}

std::string to_string(CriticalMode mode) {
  switch (mode) {
    case CriticalMode::fujita_q1: return "fujita_q1";
    case CriticalMode::fujita_power: return "fujita_power";
    case CriticalMode::alpha_eq_r: return "alpha_eq_r";
  }
  return "?";
}

MonotonicityTerms monotonicity_terms(const MonotonicitySample& s, double p) {
  const double du = s.uy - s.ux;
  const double dv = s.vy - s.vx;
  const double zx = std::max(s.ux - s.vx - s.h, 0.0);
  const double zy = std::max(s.uy - s.vy - s.h, 0.0);
  auto power = [](double z, double a) { return z > 0.0 ? std::pow(z, a) : 0.0; };
  const double e = (s.theta - 1.0 + p) / p;
  MonotonicityTerms terms;
  terms.lhs = (signed_power(du, p) - signed_power(dv, p)) * (power(zy, s.theta) - power(zx, s.theta));
  terms.rhs = std::pow(std::abs(power(zy, e) - power(zx, e)), p);
  return terms;
}

double monotonicity_gap(const MonotonicitySample& sample, double p, double C0) {
  const auto terms = monotonicity_terms(sample, p);
  return terms.lhs - C0 * terms.rhs;
}

MonotonicitySample draw_monotonicity_sample(std::mt19937_64& rng, double theta) {
  std::uniform_real_distribution<double> decade(-3.0, 3.0);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  std::uniform_int_distribution<int> quarter(0, 3);
  const double scale = std::pow(10.0, decade(rng));
  MonotonicitySample s;
  s.ux = scale * cauchy(rng);
  s.uy = scale * cauchy(rng);
  s.vx = scale * cauchy(rng);
  s.vy = scale * cauchy(rng);
  s.h = quarter(rng) == 0 ? 0.0 : scale * std::abs(cauchy(rng));
  s.theta = theta;
  return s;
}

double find_C0(double p, double theta, std::size_t n_samples, std::uint64_t seed) {
  if (p < 2.0) throw std::invalid_argument("find_C0: p must be >= 2");
  if (!(theta > 0.0)) throw std::invalid_argument("find_C0: theta must be > 0");
  std::mt19937_64 rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto terms = monotonicity_terms(draw_monotonicity_sample(rng, theta), p);
    if (terms.rhs > 0.0 && std::isfinite(terms.rhs) && std::isfinite(terms.lhs)) {
      best = std::min(best, terms.lhs / terms.rhs);
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("find_C0: every sampled right-hand side was zero");
  return best;
}

double dissipation_residual(const DecaySeries& series) {
  if (series.records.empty()) return 0.0;
  const double mass0 = series.records.front().mass;
  if (!(mass0 > 0.0)) return 0.0;
  double worst = 0.0;
  for (const auto& r : series.records) {
    worst = std::max(worst, std::abs(r.mass - mass0 + r.absorbed_cum + r.flux_cum) / mass0);
  }
  return worst;
}

}  // namespace plap
