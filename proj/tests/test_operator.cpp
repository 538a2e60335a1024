#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "plap/operator.hpp"

using namespace plap;

namespace {

WeightedGraph ring(int n) {
  std::vector<WeightedGraph::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0 + 0.25 * (i % 3)});
  return WeightedGraph::from_edges(0, edges);
}

ScalarField random_field(Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::exponential_distribution<double> dist(1.0);
  ScalarField u(n);
  for (Index i = 0; i < n; ++i) u[i] = dist(rng);
  return u;
}

ScalarField indicator(const WeightedGraph& g, Index x, double value = 1.0) {
  ScalarField u = ScalarField::Zero(g.size());
  u[x] = value;
  return u;
}

}  // namespace

TEST_CASE("q_eval on the three families") {
  CHECK(q_eval(AbsorptionProfile::constant(1.0), 7.0) == 1.0);
  CHECK(q_eval(AbsorptionProfile::power(2.0), 10.0) == doctest::Approx(0.01).epsilon(1e-15));
  const double e2 = std::exp(2.0);
  CHECK(q_eval(AbsorptionProfile::power_log(0.0, 1.0), e2) == doctest::Approx(2.0).epsilon(1e-14));
  // below the pivot the value is frozen
  CHECK(q_eval(AbsorptionProfile::power(2.0), 0.0) == 1.0);
  CHECK(q_eval(AbsorptionProfile::power(2.0), 0.5) == 1.0);
  CHECK(q_eval(AbsorptionProfile::power_log(1.0, 2.0), 0.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("q_eval is positive and nonincreasing for decaying powers") {
  for (const auto& profile : {AbsorptionProfile::power(0.5), AbsorptionProfile::power(2.0),
                              AbsorptionProfile::power_log(1.0, 2.0), AbsorptionProfile::constant(0.3)}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double s = 0.0; s < 500.0; s += 0.37) {
      const double q = q_eval(profile, s);
      CHECK(q > 0.0);
      if (profile.kind == AbsorptionProfile::Kind::power && s >= 1.0) CHECK(q <= prev);
      prev = q;
    }
  }
}

TEST_CASE("monotonicity window of q") {
  auto power = AbsorptionProfile::power(2.0);
  power.alpha1 = 2.0;
  power.alpha2 = 2.0;
  CHECK(validate_monotonicity(power, 100));
  power.alpha1 = 0.0;
  CHECK(validate_monotonicity(power, 100));
  auto flat = AbsorptionProfile::constant(1.0);
  flat.alpha1 = 1.0;
  flat.alpha2 = 1.0;
  CHECK_FALSE(validate_monotonicity(flat, 100));
  // alpha2 below the decay rate: q s^alpha2 decreases
  power.alpha2 = 1.0;
  CHECK_FALSE(validate_monotonicity(power, 100));
  CHECK_THROWS_AS(validate_monotonicity(power, 1), std::invalid_argument);
}

TEST_CASE("p-Laplacian hand values on Z^1") {
  const auto g = build_lattice({1, 3, 1.0});
  const std::array<int, 1> origin{0}, one{1};
  const auto u = indicator(g, g.index_of_point(origin));
  const auto lap = p_laplacian(g, u, 2.0);
  CHECK(lap[g.index_of_point(origin)] == -1.0);
  CHECK(lap[g.index_of_point(one)] == 0.5);

  const auto lap4 = p_laplacian(g, (2.0 * u).eval(), 4.0);
  CHECK(lap4[g.index_of_point(origin)] == -8.0);
}

TEST_CASE("constant field is harmonic without ghosts") {
  const auto g = ring(7);
  const ScalarField u = ScalarField::Constant(g.size(), 5.0);
  for (double p : {2.0, 2.5, 3.0, 4.0}) CHECK(p_laplacian(g, u, p).isZero(0.0));
}

TEST_CASE("expression arguments are accepted") {
  const auto g = ring(5);
  const ScalarField u = random_field(g.size(), 1);
  const ScalarField v = random_field(g.size(), 2);
  const ScalarField sum = u + v;
  CHECK(p_laplacian(g, u + v, 3.0) == p_laplacian(g, sum, 3.0));
}

TEST_CASE("weighted sum of the operator balances the ghost flux") {
  for (double p : {2.0, 2.7, 3.0, 4.0}) {
    const auto closed = ring(11);
    const auto u = random_field(closed.size(), 5);
    const ScalarField lap = p_laplacian(closed, u, p);
    const double scale = lap.cwiseAbs().dot(closed.measure());
    CHECK(std::abs(lap.dot(closed.measure())) <= 1e-13 * scale);

    const auto lattice = build_lattice({2, 4, 1.0});
    const auto w = random_field(lattice.size(), 6);
    const ScalarField lap2 = p_laplacian(lattice, w, p);
    const double total = lap2.dot(lattice.measure()) + boundary_flux(lattice, w, p);
    CHECK(std::abs(total) <= 1e-12 * lap2.cwiseAbs().dot(lattice.measure()));
  }
}

TEST_CASE("homogeneity of degree p-1") {
  const auto g = build_lattice({2, 5, 0.7});
  const auto u = random_field(g.size(), 9);
  for (double p : {2.0, 2.5, 3.0, 4.0, 5.5}) {
    for (double c : {0.1, 3.0, 17.0}) {
      const ScalarField lhs = p_laplacian(g, (c * u).eval(), p);
      const ScalarField rhs = std::pow(c, p - 1.0) * p_laplacian(g, u, p);
      CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }
  }
}

TEST_CASE("long double fields go through the same operator") {
  const auto g = build_lattice({1, 4, 1.0});
  const Field<long double> u = random_field(g.size(), 4).cast<long double>();
  const auto lap = p_laplacian(g, u, 3.0L);
  const auto lap_d = p_laplacian(g, u.cast<double>().eval(), 3.0);
  CHECK((lap.cast<double>() - lap_d).norm() <= 1e-14 * lap_d.norm());
}

TEST_CASE("translation invariance away from the boundary") {
  const auto g = build_lattice({2, 8, 1.0});
  auto idx = [&](int a, int b) {
    const std::array<int, 2> p{a, b};
    return g.index_of_point(p);
  };
  ScalarField u = ScalarField::Zero(g.size());
  ScalarField v = ScalarField::Zero(g.size());
  u[idx(0, 0)] = 1.0;
  u[idx(1, 0)] = 0.5;
  u[idx(0, -1)] = 2.0;
  v[idx(2, 1)] = 1.0;
  v[idx(3, 1)] = 0.5;
  v[idx(2, 0)] = 2.0;
  const auto lu = p_laplacian(g, u, 3.0);
  const auto lv = p_laplacian(g, v, 3.0);
  for (int a = -3; a <= 3; ++a) {
    for (int b = -3; b <= 3; ++b) {
      if (std::abs(a) + std::abs(b) > 3) continue;
      CHECK(lu[idx(a, b)] == doctest::Approx(lv[idx(a + 2, b + 1)]).epsilon(1e-15));
    }
  }
}

TEST_CASE("non-finite input is rejected") {
  const auto g = build_lattice({1, 2, 1.0});
  ScalarField u = ScalarField::Zero(g.size());
  u[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p_laplacian(g, u, 2.0), std::domain_error);
  CHECK_THROWS_AS(p_laplacian(g, ScalarField::Zero(3).eval(), 2.0), std::invalid_argument);
}

TEST_CASE("right-hand side") {
  const auto g = build_lattice({1, 3, 1.0});
  const auto q1 = AbsorptionProfile::constant(1.0);
  CHECK(rhs(g, ScalarField::Zero(g.size()).eval(), 3.0, 4.0, q1).isZero(0.0));

  const auto iso = WeightedGraph::isolated_vertex();
  CHECK(rhs(iso, ScalarField::Ones(1).eval(), 2.0, 2.0, q1)[0] == -1.0);

  const std::array<int, 1> origin{0};
  const auto u = indicator(g, g.index_of_point(origin));
  CHECK(rhs(g, u, 2.0, 2.0, q1)[g.index_of_point(origin)] == -2.0);

  // absorption follows the distance to the root
  const auto decaying = AbsorptionProfile::power(1.0);
  const ScalarField ones = ScalarField::Ones(g.size());
  const auto f = rhs(g, ones, 2.0, 2.0, decaying);
  const auto lap = p_laplacian(g, ones, 2.0);
  for (Index x = 0; x < g.size(); ++x) {
    CHECK(f[x] == doctest::Approx(lap[x] - 1.0 / std::max(1, g.depth(x))));
  }
}

TEST_CASE("powers at zero") {
  CHECK(positive_power(0.0, 1.5) == 0.0);
  CHECK(positive_power(0.0, 2.0) == 0.0);
  CHECK(signed_power(0.0, 2.0) == 0.0);
  CHECK(signed_power(0.0, 2.5) == 0.0);
  CHECK(signed_power(-2.0, 3.0) == -4.0);
  CHECK(signed_power(-2.0, 2.5) == doctest::Approx(-2.0 * std::sqrt(2.0)));
}
