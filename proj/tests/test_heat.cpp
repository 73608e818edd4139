#include <cmath>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "doctest.h"
#include "ctl/heat.hpp"

using namespace ctl;
using doctest::Approx;

namespace {

Point flat(const ModelSpace& sp, std::initializer_list<double> c) {
  Eigen::VectorXd v(c.size());
  int i = 0;
  for (double x : c) v(i++) = x;
  return sp.make_point(v);
}

}  // namespace

TEST_SUITE("heat") {

TEST_CASE("P_0 is the identity") {
  const auto s = ModelSpace::sphere(2);
  const auto f = zonal_cosine(s);
  const Point x = sphere_point(s, 0.7);
  CHECK(heat_apply(s, HeatBackend::sphere_zonal(), f.f, 0.0, x).value == Approx(std::cos(0.7)).epsilon(1e-12));
  const auto e = ModelSpace::euclidean(2);
  const auto sq = coordinate_square(e);
  CHECK(heat_apply(e, HeatBackend::euclidean_gaussian(), sq.f, 0.0, flat(e, {0.3, 1.0})).value ==
        Approx(0.09).epsilon(1e-14));
}

TEST_CASE("spectral oracles on the sphere") {
  const auto s = ModelSpace::sphere(2);
  const HeatSemigroup p(s, HeatBackend::sphere_zonal(), zonal_cosine(s).f);
  for (double theta : {0.2, 1.0, std::numbers::pi / 3, 2.8}) {
    const Point x = sphere_point(s, theta, 0.4);
    for (double t : {0.05, 0.5, 1.0}) {
      CHECK(std::abs(p.apply(t, x).value - std::exp(-2 * t) * std::cos(theta)) < 1e-8);
      CHECK(std::abs(p.generator(t, x).value + 2 * std::exp(-2 * t) * std::cos(theta)) < 1e-5);
    }
  }
  const Point x = sphere_point(s, std::numbers::pi / 3);
  CHECK(std::abs(p.grad(0.5, x).value - std::exp(-1.0) * std::sqrt(3.0) / 2) < 1e-4);

  // sin^2 = (2/3)(P_0 - P_2): eigenvalues 0 and -6
  const HeatSemigroup q(s, HeatBackend::sphere_zonal(), [&s](const Point& y) {
    const double th = polar_angle(s, y);
    return std::sin(th) * std::sin(th);
  });
  for (double theta : {0.3, 1.4, 2.5}) {
    const double u = std::cos(theta);
    const double expect = 2.0 / 3.0 * (1.0 - std::exp(-6.0 * 0.4) * boost::math::legendre_p(2, u));
    CHECK(std::abs(q.apply(0.4, sphere_point(s, theta)).value - expect) < 1e-8);
  }
  // a degree-5 zonal polynomial
  const HeatSemigroup r(s, HeatBackend::sphere_zonal(), [&s](const Point& y) {
    return boost::math::legendre_p(5, std::cos(polar_angle(s, y)));
  });
  CHECK(std::abs(r.apply(0.1, sphere_point(s, 0.9)).value -
                 std::exp(-30 * 0.1) * boost::math::legendre_p(5, std::cos(0.9))) < 1e-8);
  CHECK_THROWS(HeatSemigroup(s, HeatBackend::sphere_zonal(), coordinate_sine(ModelSpace::euclidean(3)).f));
}

TEST_CASE("circle Fourier backend") {
  const auto c = ModelSpace::sphere(1, 2.0);
  const HeatSemigroup p(c, HeatBackend::circle_fourier(), circle_sine(c, 3).f);
  for (double phi : {0.1, 2.0, 4.0}) {
    CHECK(std::abs(p.apply(0.3, sphere_point(c, phi)).value - std::exp(-9 * 0.3 / 4) * std::sin(3 * phi)) < 1e-10);
  }
  CHECK_THROWS(HeatSemigroup(c, HeatBackend::circle_fourier(4), circle_sine(c).f));
}

TEST_CASE("Gaussian moment oracles on flat space") {
  const auto e = ModelSpace::euclidean(1);
  const HeatSemigroup lin(e, HeatBackend::euclidean_gaussian(), coordinate(e).f);
  const HeatSemigroup sq(e, HeatBackend::euclidean_gaussian(), coordinate_square(e).f);
  for (double x0 : {-1.3, 0.4, 2.0}) {
    const Point x = flat(e, {x0});
    CHECK(lin.apply(0.7, x).value == Approx(x0).epsilon(1e-12));
    CHECK(std::abs(lin.generator(0.7, x).value) < 1e-8);
    CHECK(sq.apply(0.7, x).value == Approx(x0 * x0 + 2 * 0.7).epsilon(1e-12));
    CHECK(sq.grad(0.7, x).value == Approx(2 * std::abs(x0)).epsilon(1e-6));
    CHECK(sq.generator(0.7, x).value == Approx(2.0).epsilon(1e-6));
  }
  const auto e2 = ModelSpace::euclidean(2);
  CHECK(HeatSemigroup(e2, HeatBackend::euclidean_gaussian(), [](const Point& y) { return y.coords.squaredNorm(); })
            .generator(0.5, flat(e2, {0.1, 0.2}))
            .value == Approx(4.0).epsilon(1e-6));
  CHECK(HeatSemigroup(e, HeatBackend::euclidean_gaussian(), constant_function(3.0).f).grad(0.3, flat(e, {0.2})).value ==
        Approx(0.0).scale(1.0));
}

TEST_CASE("Mehler oracle") {
  const auto ou = ModelSpace::ornstein_uhlenbeck(1, 1.0);
  const HeatSemigroup p(ou, HeatBackend::ou_mehler(), coordinate_sine(ou).f);
  for (double x0 : {-2.0, 0.3, 1.5}) {
    for (double t : {0.1, 1.0}) {
      const double var = 1.0 - std::exp(-2 * t);
      const Point x = flat(ou, {x0});
      CHECK(std::abs(p.apply(t, x).value - std::sin(std::exp(-t) * x0) * std::exp(-var / 2)) < 1e-10);
      CHECK(std::abs(p.grad(t, x).value - std::exp(-t) * std::abs(std::cos(std::exp(-t) * x0)) * std::exp(-var / 2)) < 1e-6);
    }
  }
  CHECK_THROWS(HeatSemigroup(ModelSpace::euclidean(1), HeatBackend::ou_mehler(), coordinate_sine(ou).f));
}

TEST_CASE("semigroup property, mass and positivity") {
  const auto s = ModelSpace::sphere(2);
  const auto backend = HeatBackend::sphere_zonal();
  const auto f = [&s](const Point& y) { return std::exp(std::cos(polar_angle(s, y))); };
  const HeatSemigroup inner(s, backend, f);
  const HeatSemigroup outer(s, backend, [&inner](const Point& y) { return inner.apply(0.2, y).value; });
  for (double theta : {0.4, 1.9}) {
    const Point x = sphere_point(s, theta);
    CHECK(std::abs(outer.apply(0.3, x).value - inner.apply(0.5, x).value) < 1e-8);
    CHECK(inner.apply(0.3, x).value > 0.0);
  }
  CHECK(HeatSemigroup(s, backend, constant_function(1.0).f).apply(0.6, sphere_point(s, 1.0)).value ==
        Approx(1.0).epsilon(1e-12));

  const auto ou = ModelSpace::ornstein_uhlenbeck(2, 0.5);
  const HeatSemigroup a(ou, HeatBackend::ou_mehler(), coordinate_sine(ou).f);
  const HeatSemigroup b(ou, HeatBackend::ou_mehler(), [&a](const Point& y) { return a.apply(0.25, y).value; });
  CHECK(std::abs(b.apply(0.5, flat(ou, {0.7, -0.2})).value - a.apply(0.75, flat(ou, {0.7, -0.2})).value) < 1e-8);
}

TEST_CASE("Monte Carlo backend agrees with the deterministic ones") {
  WalkConfig cfg;
  cfg.k = 20;
  cfg.n_trajectories = 4000;
  cfg.seed = 9;
  struct Case {
    ModelSpace space;
    TestFunction f;
    Point x;
  };
  const auto s2 = ModelSpace::sphere(2);
  const auto s1 = ModelSpace::sphere(1);
  const auto e = ModelSpace::euclidean(2);
  const auto ou = ModelSpace::ornstein_uhlenbeck(1, 1.0);
  const std::vector<Case> cases{{s2, zonal_cosine(s2), sphere_point(s2, 0.8)},
                                {s1, circle_sine(s1, 2), sphere_point(s1, 0.5)},
                                {e, coordinate_sine(e), flat(e, {0.4, -0.1})},
                                {ou, coordinate_square(ou), flat(ou, {1.2})}};
  for (const auto& c : cases) {
    const HeatValue mc = heat_apply(c.space, HeatBackend::monte_carlo(cfg), c.f.f, 0.5, c.x);
    const HeatValue det = heat_apply(c.space, HeatBackend::deterministic_for(c.space), c.f.f, 0.5, c.x);
    CAPTURE(c.space.name());
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.value - det.value) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("heat_sample") {
  WalkConfig cfg;
  cfg.k = 20;
  cfg.seed = 4;
  const auto e = ModelSpace::euclidean(2);
  const Point o = e.base_point();
  const auto zero = heat_sample(e, 0.0, o, 5, cfg);
  for (const auto& p : zero.points) CHECK(p.coords.norm() == 0.0);
  const auto cloud = heat_sample(e, 0.8, o, 5000, cfg);
  std::vector<double> sq;
  for (const auto& p : cloud.points) sq.push_back(p.coords(1) * p.coords(1));
  const MeanStats v = mean_stats(sq);
  CHECK(std::abs(v.mean - 1.6) <= 3.0 * v.std_error);

  const auto ou = ModelSpace::ornstein_uhlenbeck(1, 1.0);
  const auto oc = heat_sample(ou, 0.5, flat(ou, {2.0}), 5000, cfg);
  std::vector<double> m;
  for (const auto& p : oc.points) m.push_back(p.coords(0));
  const MeanStats mm = mean_stats(m);
  CHECK(std::abs(mm.mean - 2.0 * std::exp(-0.5)) <= 3.0 * mm.std_error);
}

TEST_CASE("mono_app on deterministic backends") {
  const auto s = ModelSpace::sphere(2);
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const double a = rng.uniform() * 2.0, r = 0.05 + 0.9 * rng.uniform(), delta = 0.01 + rng.uniform();
    const auto g = [a, &s](const Point& y) {
      const double c = std::cos(polar_angle(s, y));
      return a * c * c;
    };
    const double m = mono_app_margin(s, HeatBackend::sphere_zonal(), g, r, delta, 0.3, sphere_point(s, rng.uniform() * 3.0));
    CHECK(m >= -1e-10);
  }
}

TEST_CASE("Legendre recurrence") {
  for (double u : {-0.9, 0.1, 0.77}) {
    const auto p = legendre_values(12, u);
    for (int l = 0; l < 12; ++l) CHECK(p[l] == Approx(boost::math::legendre_p(l, u)).epsilon(1e-13));
  }
}

}  // TEST_SUITE
