#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "ctl/comparison.hpp"
#include "ctl/heat.hpp"
#include "ctl/hopf_lax.hpp"
#include "ctl/lab.hpp"
#include "ctl/reparam.hpp"
#include "ctl/rng.hpp"
#include "ctl/test_functions.hpp"
#include "ctl/walk.hpp"

using namespace ctl;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

int failures = 0;

void criterion(int n, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs >= budget_s) {
    o.ok = false;
    o.detail += fmt(" over time budget %.0f s", budget_s);
  }
  std::printf("AC%d %s %s (%.2f s)\n", n, o.ok ? "PASS" : "FAIL", o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.ok) ++failures;
}

CheckSpec spec(CheckId id, const std::string& kind, int dim) {
  CheckSpec s;
  s.id = id;
  s.space.kind = kind;
  s.space.dim = dim;
  s.seed = 20240611;
  return s;
}

Outcome ac1() {
  CheckSpec s = spec(CheckId::W2Control, "euclidean", 2);
  s.K = 0.0;
  s.N = 2.0;
  const auto r = check_w2_control(s);
  const bool ok = std::abs(r.rhs - 2.0) < 1e-12 && std::abs(r.margin) <= 3.0 * r.sigma &&
                  r.sigma <= 0.05;
  return {ok, fmt("W2^2=%.4f rhs=%.4f margin=%.4f sigma=%.4f", r.lhs, r.rhs, r.margin, r.sigma)};
}

// max over a polar grid of rhs - lhs for cos(theta) on the unit sphere at time t
double bl0_residual(double t) {
  const auto s = ModelSpace::sphere(2);
  const TestFunction tf = zonal_cosine(s);
  const HeatBackend b = HeatBackend::sphere_zonal();
  const HeatSemigroup pf(s, b, tf.f);
  const HeatSemigroup pg(s, b, [&tf](const Point& x) { return std::pow(tf.grad_norm(x), 2.0); });
  double worst = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const Point x = sphere_point(s, std::numbers::pi * i / 64.0);
    const double g = pf.grad(t, x).value;
    const double gen = pf.generator(t, x, std::min(1e-4, t / 10.0)).value;
    const double rhs = std::exp(-2.0 * t) * pg.apply(t, x).value - contraction_gap(1.0, t) / 2.0 * gen * gen;
    worst = std::max(worst, std::abs(rhs - g * g));
  }
  return worst;
}

Outcome ac2() {
  CheckSpec s = spec(CheckId::BL0, "sphere", 2);
  s.times = {0.1, 0.5, 1.0};
  s.grid = 64;
  const auto r = check_bl0(s);
  const double r1 = bl0_residual(1e-3), r2 = bl0_residual(2e-3);
  const double order = std::log(r2 / r1) / std::log(2.0);
  const bool ok = r.margin >= -1e-5 && r1 <= 10.0 * 1e-3 && order >= 0.9;
  return {ok, fmt("min margin=%.3g residual(1e-3)=%.3g observed order=%.2f", r.margin, r1, order)};
}

Outcome ac3() {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> tau(0.0, 4.0), k(-2.0, 2.0), n(1.5, 10.0), u(0.0, 1.0);
  double worst = kInfinity;
  for (int i = 0; i < 10000; ++i) {
    double t1 = 4.0 - tau(gen), t2 = 4.0 - tau(gen);
    if (t1 > t2) std::swap(t1, t2);
    const CurvatureDimension cd(k(gen), n(gen));
    const double ks = cd.kstar();
    const double rmax = ks > 0.0 ? std::numbers::pi / std::sqrt(ks) : 5.0;
    const double r = std::min(rmax, 5.0) * (0.001 + 0.998 * u(gen));
    worst = std::min(worst, psi_upper_bound(t1, t2, cd, r) - psi(t1, t2, cd, r));
  }
  return {worst >= -1e-12, fmt("worst margin=%.3g over 1e4 cases", worst)};
}

Outcome ac4() {
  std::string detail;
  bool ok = true;
  for (double p : {2.0, 3.0}) {
    CheckSpec s = spec(CheckId::PreCtl, "sphere", 2);
    s.p = p;
    const auto r = check_prectl(s);
    ok = ok && std::abs(r.K - 0.9) < 1e-15 && r.margin >= -3.0 * r.sigma;
    detail += fmt("p=%.0f lhs=%.4f rhs=%.4f sigma=%.4f; ", p, r.lhs, r.rhs, r.sigma);
  }
  return {ok, detail};
}

Outcome ac5() {
  double res[2];
  int i = 0;
  for (int n : {256, 512}) {
    const auto g = FiniteMetricSpace::circle(n);
    ScalarField f(n);
    for (int j = 0; j < n; ++j) f(j) = std::sin(2.0 * std::numbers::pi * j / n);
    res[i++] = hj_residual(g, f, 0.5, 2.0).max_included();
  }
  return {res[0] / res[1] >= 1.5, fmt("residual n=256 %.3g n=512 %.3g ratio=%.2f", res[0], res[1], res[0] / res[1])};
}

Outcome ac6() {
  Rng rng(6);
  const auto e = ModelSpace::euclidean(2);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(e.make_point(rng.normal_vector(2)));
    const auto sp = FiniteMetricSpace::from_points(e, pts);
    Eigen::VectorXd mu(20), nu(20);
    for (int i = 0; i < 20; ++i) {
      mu(i) = rng.uniform();
      nu(i) = rng.uniform();
    }
    mu /= mu.sum();
    nu /= nu.sum();
    worst = std::max(worst, std::abs(kantorovich_gap(sp, mu, nu, t % 2 ? 2.0 : 3.0).gap));
  }
  return {worst <= 1e-8, fmt("max |gap|=%.3g over 100 instances", worst)};
}

Outcome ac7() {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> k(-2.0, 2.0), n(1.5, 10.0), a(0.01, 2.0), len(0.01, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double K = k(gen), N = n(gen), s = a(gen), t = s + len(gen);
    const CurvatureDimension cd(K, N);
    const double jo = oracle::j_measure(K, N, s, t), ao = oracle::coeff_A(K, N, s, t);
    worst = std::max(worst, std::abs(j_measure(cd, s, t) - jo) / std::max(1.0, std::abs(jo)));
    worst = std::max(worst, std::abs(coeff_A(cd, s, t) - ao) / std::max(1.0, std::abs(ao)));
  }
  return {worst <= 1e-10, fmt("max deviation=%.3g", worst)};
}

Outcome ac8() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> k(-2.0, 2.0), n(1.5, 10.0), a(0.05, 1.0), len(0.1, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto fam = CoefficientFamily::BakryLedoux({k(gen), n(gen)});
    const double s = a(gen), t = s + len(gen);
    const auto res = duality_constancy(fam, duality_reparam(fam, s, t), 64);
    worst = std::max({worst, res.speed, res.contraction});
  }
  return {worst < 1e-8, fmt("max residual=%.3g", worst)};
}

Outcome ac9() {
  const int n = 1000000;
  bool ok = true;
  double worst_z = 0.0;
  for (int m : {2, 3}) {
    Rng rng(90 + m);
    std::vector<std::vector<double>> sq(m * m, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd z = sample_unit_ball(m, rng);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) sq[a * m + b][i] = z(a) * z(b);
    }
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        const MeanStats st = mean_stats(sq[a * m + b]);
        const double z = std::abs(st.mean - (a == b ? 1.0 / (m + 2.0) : 0.0)) / st.std_error;
        worst_z = std::max(worst_z, z);
      }
    }
  }
  const auto sp = ModelSpace::sphere(2);
  Rng rng(95);
  const Point x = sp.point_at_distance(sp.base_point(), 0.8);
  const Frame f = sp.canonical_frame(x);
  const Eigen::VectorXd e = (f.vectors.col(0) - 0.5 * f.vectors.col(1)).normalized();
  const double scale = std::sqrt(2.0 * (sp.dim() + 2));
  std::vector<double> proj(n), proj2(n);
  for (int i = 0; i < n; ++i) {
    proj[i] = scale * (f.vectors * sample_unit_ball(sp.dim(), rng)).dot(e);
    proj2[i] = proj[i] * proj[i];
  }
  const MeanStats a = mean_stats(proj), b = mean_stats(proj2);
  worst_z = std::max({worst_z, std::abs(a.mean) / a.std_error, std::abs(b.mean - 2.0) / b.std_error});
  ok = worst_z <= 4.0;
  return {ok, fmt("max |z|=%.2f; projected mean=%.4f second moment=%.4f", worst_z, a.mean, b.mean)};
}

Outcome ac10() {
  CheckSpec s = spec(CheckId::BL0, "sphere", 2);
  s.K = 2.0;
  const auto r = check_bl0(s);
  return {r.verdict == Verdict::Fail, fmt("margin=%.4f at t=%.2f", r.margin, r.t) + " verdict=" + to_string(r.verdict)};
}

Outcome ac11() {
  Rng rng(11);
  const auto sphere = ModelSpace::sphere(2);
  const auto circle = ModelSpace::sphere(1);
  const auto flat = ModelSpace::euclidean(2);
  const auto ou = ModelSpace::ornstein_uhlenbeck(1, 1.0);
  double worst = kInfinity;
  for (int i = 0; i < 100; ++i) {
    const double a = 2.0 * rng.uniform(), c = 0.5 * rng.uniform();
    const double r = 0.05 + 0.9 * rng.uniform(), delta = 0.01 + rng.uniform();
    const double t = 0.05 + rng.uniform();
    double m = 0.0;
    switch (i % 4) {
      case 0:
        m = mono_app_margin(sphere, HeatBackend::sphere_zonal(),
                            [&](const Point& y) { const double v = std::cos(polar_angle(sphere, y)); return a * v * v + c; },
                            r, delta, t, sphere_point(sphere, 3.0 * rng.uniform()));
        break;
      case 1:
        m = mono_app_margin(circle, HeatBackend::circle_fourier(),
                            [&](const Point& y) { const double v = std::sin(circle_angle(y)); return a * v * v + c; },
                            r, delta, t, sphere_point(circle, 0.0, 6.0 * rng.uniform()));
        break;
      case 2:
        m = mono_app_margin(flat, HeatBackend::euclidean_gaussian(),
                            [&](const Point& y) { const double v = std::sin(y.coords(0)); return a * v * v + c; },
                            r, delta, t, flat.make_point(rng.normal_vector(2)));
        break;
      default:
        m = mono_app_margin(ou, HeatBackend::ou_mehler(),
                            [&](const Point& y) { const double v = std::sin(y.coords(0)); return a * v * v + c; },
                            r, delta, t, ou.make_point(rng.normal_vector(1)));
    }
    worst = std::min(worst, m);
  }
  return {worst >= -1e-10, fmt("min margin=%.3g over 100 cases", worst)};
}

Outcome ac12() {
  CheckSpec s = spec(CheckId::Lp2, "sphere", 2);
  s.p = 2.0;
  const auto r = check_lp2(s);
  return {std::abs(r.K - 0.9) < 1e-15 && r.margin >= -3.0 * r.sigma,
          fmt("lhs=%.4f rhs=%.4f margin=%.4f sigma=%.4f", r.lhs, r.rhs, r.margin, r.sigma)};
}

}  // namespace

int main() {
  criterion(1, 60.0, ac1);
  criterion(2, 5.0, ac2);
  criterion(3, 1.0, ac3);
  criterion(4, 120.0, ac4);
  criterion(5, 10.0, ac5);
  criterion(6, 10.0, ac6);
  criterion(7, 5.0, ac7);
  criterion(8, 0.0, ac8);
  criterion(9, 0.0, ac9);
  criterion(10, 0.0, ac10);
  criterion(11, 0.0, ac11);
  criterion(12, 0.0, ac12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
