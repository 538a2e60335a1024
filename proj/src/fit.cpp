#include "plap/fit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace plap {

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  const auto n = static_cast<Index>(x.size());
  if (n < 2) throw std::invalid_argument("fit_loglog: need at least two points");

  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd target(n);
  for (Index i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog: values must be positive");
    }
    design(i, 0) = 1.0;
    design(i, 1) = std::log(x[i]);
    target[i] = std::log(y[i]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(target);

  SlopeFit fit;
  fit.intercept = coef[0];
  fit.slope = coef[1];
  fit.points = x.size();
  if (n > 2) {
    const double ssr = (target - design * coef).squaredNorm();
    const Eigen::VectorXd centred = design.col(1).array() - design.col(1).mean();
    const double sxx = centred.squaredNorm();
    fit.std_error = sxx > 0.0 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  }
  return fit;
}

SlopeFit fit_decay_exponent(const DecaySeries& series, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw std::invalid_argument("fit window needs t_lo < t_hi");
  // Sample times hit the window ends up to rounding of the schedule.
  const double lo = t_lo * (1.0 - 1e-12);
  const double hi = t_hi * (1.0 + 1e-12);
  std::vector<double> t, m;
  for (const auto& r : series.records) {
    if (r.t < lo || r.t > hi) continue;
    if (!(r.mass > 0.0)) {
      throw std::invalid_argument("nonpositive mass at t = " + std::to_string(r.t) +
                                  " inside the fit window");
    }
    t.push_back(r.t);
    m.push_back(r.mass);
  }
  if (t.size() < 5) {
    throw std::invalid_argument("fit window [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) +
                                "] holds " + std::to_string(t.size()) + " records; need 5");
  }
  return fit_loglog(t, m);
}

}  // namespace plap
