#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ctl/lab.hpp"

using namespace ctl;
using doctest::Approx;

namespace {

CheckSpec make(CheckId id, const std::string& kind, int dim) {
  CheckSpec s;
  s.id = id;
  s.space.kind = kind;
  s.space.dim = dim;
  return s;
}

CheckSpec small_mc(CheckSpec s) {
  s.n_trajectories = 2000;
  s.k = 20;
  s.batch_size = 500;
  return s;
}

void check_consistent(const VerificationReport& r, const CheckSpec& s) {
  CHECK(r.margin == Approx(r.rhs - r.lhs).epsilon(1e-12).scale(1.0));
  CHECK(r.recomputed_verdict(s.z, s.epsilon, s.sigma_max) == r.verdict);
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("verdict rule") {
  CHECK(decide_verdict(0.1, 0.0, false, 3, 1e-5, kInfinity) == Verdict::Pass);
  CHECK(decide_verdict(-1e-6, 0.0, false, 3, 1e-5, kInfinity) == Verdict::Pass);
  CHECK(decide_verdict(-1e-4, 0.0, false, 3, 1e-5, kInfinity) == Verdict::Fail);
  CHECK(decide_verdict(-0.05, 0.02, true, 3, 0, kInfinity) == Verdict::Pass);
  CHECK(decide_verdict(-0.05, 0.02, true, 3, 0, 0.01) == Verdict::Inconclusive);
  CHECK(decide_verdict(-0.07, 0.02, true, 3, 0, 0.01) == Verdict::Fail);
  CHECK(decide_verdict(NAN, 0.02, true, 3, 0, 0.01) == Verdict::Inconclusive);
}

TEST_CASE("ids round-trip") {
  for (const char* name : {"w2_control", "swc", "wp", "prectl", "bl0", "blp", "bl_int", "gamma2",
                           "laplacian_comparison", "lp2", "wvar_ode", "mono_app"}) {
    CHECK(to_string(check_id_from_string(name)) == name);
  }
  CHECK_THROWS(check_id_from_string("bl9"));
  CHECK(is_statistical(CheckId::Lp2));
  CHECK_FALSE(is_statistical(CheckId::BL0));
}

TEST_CASE("sphere statistical checks fall back to 0.9 K") {
  CheckSpec s = make(CheckId::PreCtl, "sphere", 2);
  CHECK(s.curvature_dimension().K == Approx(0.9));
  s.id = CheckId::BL0;
  CHECK(s.curvature_dimension().K == Approx(1.0));
  s.K = 2.0;
  CHECK(s.curvature_dimension().K == 2.0);
}

TEST_CASE("w2_control RHS grows with N at K = 0") {
  for (double N : {1.0, 2.0, 5.0}) {
    const double h = 1e-4;
    const double d = (w2_control_rhs({0.0, N + h}, 0.25, 1.0, 1.0, 2.0) -
                      w2_control_rhs({0.0, N - std::min(h, N / 2)}, 0.25, 1.0, 1.0, 2.0));
    CHECK(d > 0.0);
  }
  CHECK(w2_control_rhs({0.0, 2.0}, 0.25, 1.0, 1.0, 2.0) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("w2_control: flat sharp case, spread clouds, and s close to t on the sphere") {
  CheckSpec flat = small_mc(make(CheckId::W2Control, "euclidean", 2));
  flat.K = 0.0;
  flat.N = 2.0;
  const auto r = check_w2_control(flat);
  CHECK(r.rhs == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(r.margin) <= 3.0 * r.sigma);
  CHECK(r.verdict == Verdict::Pass);
  check_consistent(r, flat);

  CheckSpec cloud = flat;
  cloud.measure = "cloud";
  cloud.cloud_size = 20;
  const auto rc = check_w2_control(cloud);
  CHECK(rc.margin >= -3.0 * rc.sigma);

  CheckSpec near = small_mc(make(CheckId::W2Control, "sphere", 2));
  near.s = 1.0 - 1e-3;
  near.t = 1.0;
  const auto rn = check_w2_control(near);
  CHECK(rn.margin >= -3.0 * rn.sigma);
  check_consistent(rn, near);
}

TEST_CASE("swc on the sphere and the diameter guard") {
  CheckSpec s = small_mc(make(CheckId::Swc, "sphere", 2));
  s.distance = 2.0;
  s.s = 0.1;
  s.t = 0.4;
  const auto r = check_swc(s);
  CHECK(r.K == Approx(0.9));
  CHECK(r.margin >= -3.0 * r.sigma);
  check_consistent(r, s);

  CheckSpec eq = s;
  eq.s = eq.t = 0.3;
  CHECK(check_swc(eq).margin >= -3.0 * check_swc(eq).sigma);

  CheckSpec strict = s;
  strict.K = 1.0;
  CHECK_THROWS_AS(check_swc(strict), DiameterViolation);
}

TEST_CASE("wp and prectl") {
  CheckSpec flat = small_mc(make(CheckId::PreCtl, "euclidean", 2));
  flat.p = 3.0;
  const auto r = check_prectl(flat);
  CHECK(r.rhs == Approx(1.0 + 2.0 * 3.0 * std::pow(std::sqrt(0.4) - std::sqrt(0.2), 2)).epsilon(1e-12));
  CHECK(r.margin >= -3.0 * r.sigma);

  CheckSpec wp = small_mc(make(CheckId::Wp, "euclidean", 2));
  wp.p = 2.0;
  wp.K = 0.0;
  wp.N = 2.0;
  const auto rw = check_wp(wp);
  CHECK(rw.rhs == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(rw.margin) <= 3.0 * rw.sigma);

  CheckSpec sp = small_mc(make(CheckId::Wp, "sphere", 2));
  sp.p = 3.0;
  CHECK(check_wp(sp).verdict == Verdict::Pass);

  CheckSpec bad = wp;
  bad.p = 1.5;
  bad.beta = 1.5;
  CHECK_THROWS(check_wp(bad));
}

TEST_CASE("Bakry-Ledoux checks") {
  CheckSpec s = make(CheckId::BL0, "sphere", 2);
  const auto r = check_bl0(s);
  CHECK(r.margin >= -1e-5);
  check_consistent(r, s);

  // the margin vanishes at order t as t -> 0
  CheckSpec small = s;
  small.times = {1e-3};
  small.dt = 1e-5;
  CHECK(std::abs(check_bl0(small).margin) <= 10.0 * 1e-3);

  CheckSpec ou = make(CheckId::BL0, "ou", 1);
  ou.space.lambda = 1.0;
  ou.function = "sine";
  CHECK(check_bl0(ou).verdict == Verdict::Pass);

  CheckSpec blp = make(CheckId::BLp, "sphere", 2);
  blp.p = 3.0;
  blp.grid = 32;
  CHECK(check_blp(blp).verdict == Verdict::Pass);

  CheckSpec circle = make(CheckId::BLp, "sphere", 1);
  circle.function = "sin";
  circle.p = 2.5;
  CHECK(check_blp(circle).verdict == Verdict::Pass);

  CheckSpec inflated = s;
  inflated.K = 2.0;
  CHECK(check_bl0(inflated).verdict == Verdict::Fail);
}

TEST_CASE("bl_int") {
  CheckSpec s = make(CheckId::BLInt, "sphere", 2);
  s.s = 0.2;
  s.t = 0.5;
  s.distance = std::numbers::pi / 2;
  CHECK(check_bl_int(s).margin >= -1e-5);
  CheckSpec c = s;
  c.function = "constant";
  const auto rc = check_bl_int(c);
  CHECK(rc.lhs == Approx(0.0).scale(1.0));
  CHECK(rc.margin >= -1e-12);
  CheckSpec deg = s;
  deg.s = deg.t = 0.3;
  deg.distance = 0.0;
  const auto rd = check_bl_int(deg);
  CHECK(rd.lhs == 0.0);
  CHECK(rd.rhs == 0.0);
}

TEST_CASE("gamma2") {
  CheckSpec circle = make(CheckId::Gamma2, "sphere", 1);
  circle.function = "sin";
  CHECK(check_gamma2(circle).margin >= -1e-4);
  circle.p = 3.0;
  const auto r3 = check_gamma2(circle);
  CHECK(r3.margin >= -1e-4);

  CheckSpec sphere = make(CheckId::Gamma2, "sphere", 2);
  sphere.function = "cos";
  sphere.delta = 0.1;
  CHECK(check_gamma2(sphere).margin >= -1e-4);

  CheckSpec line = make(CheckId::Gamma2, "euclidean", 1);
  line.function = "sine";
  line.p = 4.0;
  CHECK(check_gamma2(line).verdict == Verdict::Pass);

  CheckSpec bad = make(CheckId::Gamma2, "hyperbolic", 2);
  CHECK_THROWS(check_gamma2(bad));
}

TEST_CASE("Laplacian comparison") {
  CheckSpec e = make(CheckId::LaplacianComparison, "euclidean", 3);
  e.distance = 1.3;
  const auto re = check_laplacian_comparison(e);
  CHECK(re.lhs == Approx(2.0 / 1.3).epsilon(1e-5));
  CHECK(re.rhs == Approx(3.0 / 1.3).epsilon(1e-12));

  CheckSpec s = make(CheckId::LaplacianComparison, "sphere", 2);
  s.distance = 1.0;
  const auto rs = check_laplacian_comparison(s);
  CHECK(rs.lhs == Approx(1.0 / std::tan(1.0)).epsilon(1e-5));
  CHECK(rs.rhs == Approx(std::sqrt(2.0) / std::tan(1.0 / std::sqrt(2.0))).epsilon(1e-12));
  CHECK(rs.margin > 0.0);

  CheckSpec h = make(CheckId::LaplacianComparison, "hyperbolic", 2);
  h.distance = 2.0;
  const auto rh = check_laplacian_comparison(h);
  CHECK(rh.lhs == Approx(1.0 / std::tanh(2.0)).epsilon(1e-5));
  CHECK(rh.rhs == Approx(std::sqrt(2.0) / std::tanh(2.0 / std::sqrt(2.0))).epsilon(1e-12));

  CheckSpec anti = s;
  anti.distance = std::numbers::pi;
  CHECK_THROWS(check_laplacian_comparison(anti));
}

TEST_CASE("lp2") {
  CheckSpec s = small_mc(make(CheckId::Lp2, "sphere", 2));
  s.distance = 1.5;
  const auto r = check_lp2(s);
  CHECK(r.margin >= -3.0 * r.sigma);
  check_consistent(r, s);
  CheckSpec eq = s;
  eq.tau1 = eq.tau2 = 0.3;
  CHECK(check_lp2(eq).verdict == Verdict::Pass);
}

TEST_CASE("wvar_ode") {
  CheckSpec one = make(CheckId::WvarOde, "euclidean", 2);
  one.K = 0.0;
  one.N = 2.0;
  one.lambda = 1.0;
  const auto r1 = check_wvar_ode(one);
  CHECK(std::abs(r1.lhs) < 1e-8);
  CHECK(r1.rhs == Approx(0.0).scale(1.0));
  CheckSpec two = one;
  two.lambda = 2.0;
  const auto r2 = check_wvar_ode(two);
  CHECK(r2.rhs == Approx(2.0 * (2.0 + 0.5 - 2.0) / 2.0).epsilon(1e-12));
  CHECK(r2.lhs == Approx(r2.rhs).epsilon(1e-6));
  CHECK(r2.metadata.at("theta_residual_h1e-3") <= r2.metadata.at("theta_residual_h1e-2"));

  CheckSpec sphere = small_mc(make(CheckId::WvarOde, "sphere", 2));
  sphere.K = 0.9;
  sphere.lambda = 1.5;
  sphere.t = 0.3;
  sphere.dt = 0.05;
  const auto rs = check_wvar_ode(sphere);
  CHECK(rs.statistical);
  CHECK(rs.verdict != Verdict::Fail);
}

TEST_CASE("mono_app") {
  CheckSpec s = make(CheckId::MonoApp, "sphere", 2);
  CHECK(check_mono_app(s).margin >= -1e-10);
  CheckSpec e = make(CheckId::MonoApp, "euclidean", 1);
  e.function = "sine";
  e.r = 0.3;
  CHECK(check_mono_app(e).margin >= -1e-10);
}

TEST_CASE("run_suite records errors and keeps going") {
  CheckSpec bad = make(CheckId::Swc, "sphere", 2);
  bad.K = 1.0;
  CheckSpec good = make(CheckId::LaplacianComparison, "sphere", 2);
  const auto reports = run_suite({bad, good});
  REQUIRE(reports.size() == 2);
  CHECK_FALSE(reports[0].error.empty());
  CHECK(reports[0].verdict == Verdict::Inconclusive);
  CHECK(reports[1].verdict == Verdict::Pass);
}

TEST_CASE("reports are reproducible from their seeds") {
  CheckSpec s = make(CheckId::PreCtl, "sphere", 2);
  s.n_trajectories = 200;
  s.k = 10;
  s.seed = 42;
  const auto a = check_prectl(s, 1);
  const auto b = check_prectl(s, 3);
  CHECK(a.lhs == b.lhs);
  CHECK(a.stderr_lhs == b.stderr_lhs);
  CHECK(a.seed == 42);
}

TEST_CASE("spec validation") {
  CheckSpec s = make(CheckId::W2Control, "euclidean", 2);
  s.beta = 3.0;
  CHECK_THROWS(s.validate());
  s.beta = 2.0;
  s.space.kind = "torus";
  CHECK_THROWS(s.validate());
  CheckSpec ou = make(CheckId::W2Control, "ou", 2);
  ou.N = 4.0;
  CHECK_THROWS_AS(ou.curvature_dimension(), UnsupportedParameter);
}

}  // TEST_SUITE
