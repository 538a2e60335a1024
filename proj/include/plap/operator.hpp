#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "plap/absorption.hpp"
#include "plap/field.hpp"
#include "plap/graph.hpp"

namespace plap {

/// |d|^(p-2) d, with integer fast paths. For p = 2 this is d itself, so the
/// zero-difference case never evaluates 0^0.
template <typename Scalar>
inline Scalar signed_power(Scalar d, Scalar p) {
  using std::abs;
  using std::pow;
  if (p == Scalar(2)) return d;
  if (p == Scalar(3)) return abs(d) * d;
  if (p == Scalar(4)) return d * d * d;
  if (d == Scalar(0)) return Scalar(0);
  return pow(abs(d), p - Scalar(2)) * d;
}

/// u^r for u >= 0, with 0^r = 0 (r > 1 throughout).
template <typename Scalar>
inline Scalar positive_power(Scalar u, Scalar r) {
  using std::pow;
  if (!(u > Scalar(0))) return Scalar(0);
  if (r == Scalar(2)) return u * u;
  return pow(u, r);
}

namespace detail {

template <typename Derived>
void require_field(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u) {
  if (u.size() != g.size()) throw std::invalid_argument("field size does not match the graph");
  if (!u.allFinite()) throw std::domain_error("field has non-finite values (corrupted state)");
}

}  // namespace detail

/// Writes Delta_p u into `out` (resized). Ghost neighbours hold value 0.
/// Per-vertex sums run in adjacency order, then the ghost term.
template <typename Derived>
void p_laplacian_into(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u,
                      typename Derived::Scalar p, Field<typename Derived::Scalar>& out) {
  using Scalar = typename Derived::Scalar;
  detail::require_field(g, u);
  out.resize(g.size());
  for (Index x = 0; x < g.size(); ++x) {
    const Scalar ux = u[x];
    Scalar acc(0);
    for (const auto& nb : g.neighbors(x)) {
      acc += Scalar(nb.weight) * signed_power<Scalar>(u[nb.vertex] - ux, p);
    }
    if (const double ghost = g.ghost_measure(x); ghost > 0.0) {
      acc += Scalar(ghost) * signed_power<Scalar>(-ux, p);
    }
    out[x] = acc / Scalar(g.measure(x));
  }
}

template <typename Derived>
Field<typename Derived::Scalar> p_laplacian(const WeightedGraph& g,
                                            const Eigen::MatrixBase<Derived>& u,
                                            typename Derived::Scalar p) {
  Field<typename Derived::Scalar> out;
  p_laplacian_into(g, u.derived().eval(), p, out);
  return out;
}

/// Right-hand side Delta_p u - q u^r with a precomputed per-vertex density.
template <typename Derived>
void rhs_into(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u,
              typename Derived::Scalar p, typename Derived::Scalar r,
              const Eigen::VectorXd& q_density, Field<typename Derived::Scalar>& out) {
  using Scalar = typename Derived::Scalar;
  p_laplacian_into(g, u, p, out);
  for (Index x = 0; x < g.size(); ++x) {
    out[x] -= Scalar(q_density[x]) * positive_power<Scalar>(u[x], r);
  }
}

template <typename Derived>
Field<typename Derived::Scalar> rhs(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u,
                                    typename Derived::Scalar p, typename Derived::Scalar r,
                                    const AbsorptionProfile& profile) {
  Field<typename Derived::Scalar> out;
  rhs_into(g, u.derived().eval(), p, r, absorption_density(g, profile), out);
  return out;
}

/// Rate at which mass leaves through ghost edges: sum_x ghost(x) |u|^(p-2) u.
template <typename Derived>
typename Derived::Scalar boundary_flux(const WeightedGraph& g, const Eigen::MatrixBase<Derived>& u,
                                       typename Derived::Scalar p) {
  using Scalar = typename Derived::Scalar;
  Scalar flux(0);
  for (Index x = 0; x < g.size(); ++x) {
    if (const double ghost = g.ghost_measure(x); ghost > 0.0) {
      flux += Scalar(ghost) * signed_power<Scalar>(Scalar(u[x]), p);
    }
  }
  return flux;
}

/// Rate at which absorption removes mass: sum_x m(x) q(x) u(x)^r.
template <typename Derived>
typename Derived::Scalar absorption_rate(const WeightedGraph& g,
                                         const Eigen::MatrixBase<Derived>& u,
                                         typename Derived::Scalar r,
                                         const Eigen::VectorXd& q_density) {
  using Scalar = typename Derived::Scalar;
  Scalar rate(0);
  for (Index x = 0; x < g.size(); ++x) {
    rate += Scalar(g.measure(x) * q_density[x]) * positive_power<Scalar>(Scalar(u[x]), r);
  }
  return rate;
}

}  // namespace plap
