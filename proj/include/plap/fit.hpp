#pragma once

#include <cstddef>
#include <span>

#include "plap/integrator.hpp"

namespace plap {

struct SlopeFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Least-squares line through (log x, log y). Needs two or more points with
/// x, y > 0; std_error is 0 for exactly two points.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Slope of log M against log t over the records with t in [t_lo, t_hi].
/// Throws std::invalid_argument for fewer than 5 records in the window or a
/// nonpositive mass inside it.
SlopeFit fit_decay_exponent(const DecaySeries& series, double t_lo, double t_hi);

}  // namespace plap
