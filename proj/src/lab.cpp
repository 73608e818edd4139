#include "ctl/lab.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ctl/heat.hpp"
#include "ctl/reparam.hpp"
#include "ctl/transport.hpp"
#include "ctl/walk.hpp"

namespace ctl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

struct CheckInfo {
  CheckId id;
  const char* name;
  bool statistical;
};

constexpr CheckInfo kChecks[] = {
    {CheckId::W2Control, "w2_control", true},
    {CheckId::Swc, "swc", true},
    {CheckId::Wp, "wp", true},
    {CheckId::PreCtl, "prectl", true},
    {CheckId::BL0, "bl0", false},
    {CheckId::BLp, "blp", false},
    {CheckId::BLInt, "bl_int", false},
    {CheckId::Gamma2, "gamma2", false},
    {CheckId::LaplacianComparison, "laplacian_comparison", false},
    {CheckId::Lp2, "lp2", true},
    {CheckId::WvarOde, "wvar_ode", false},
    {CheckId::MonoApp, "mono_app", false},
};

// Standard error of g(X) from that of X by a symmetric secant.
double secant_sigma(const std::function<double(double)>& g, double x, double se) {
  if (se == 0.0) return 0.0;
  const double lo = std::max(0.0, x - se);
  const double hi = x + se;
  return std::abs(g(hi) - g(lo)) / (hi - lo) * se;
}

VerificationReport base_report(const CheckSpec& spec, const CurvatureDimension& cd,
                               const ModelSpace& space) {
  VerificationReport r;
  r.id = to_string(spec.id);
  r.label = spec.label;
  r.space = space.name();
  r.K = cd.K;
  r.N = cd.N;
  r.p = spec.p;
  r.beta = spec.beta;
  r.s = spec.s;
  r.t = spec.t;
  r.tau1 = spec.tau1;
  r.tau2 = spec.tau2;
  r.seed = spec.seed;
  r.statistical = is_statistical(spec.id);
  if (r.statistical) {
    r.k = spec.k;
    r.n = spec.n_trajectories;
  }
  return r;
}

void finish(VerificationReport& r, const CheckSpec& spec) {
  r.sigma = std::hypot(r.stderr_lhs, r.stderr_rhs);
  r.margin = r.rhs - r.lhs;
  r.tolerance = r.statistical ? spec.z * r.sigma : spec.epsilon;
  r.verdict = r.recomputed_verdict(spec.z, spec.epsilon, spec.sigma_max);
}

void require_finite_n(const CurvatureDimension& cd, const char* check) {
  require(cd.finite_dimension(), std::string(check) + ": needs a finite N");
}

void require_diameter(const ModelSpace& space, const CurvatureDimension& cd) {
  if (!space.satisfies_diameter_condition(cd)) {
    const CurvatureDimension alt = space.diameter_fallback(cd);
    throw DiameterViolation("diameter " + std::to_string(space.diameter()) +
                            " is not below pi sqrt((N-1)/K); use K' < K, for example K' = " +
                            std::to_string(alt.K));
  }
}

struct Marginals {
  std::vector<Point> mu0;
  std::vector<Point> mu1;
  bool dirac = true;
};

std::vector<Point> cloud(const ModelSpace& space, const Point& center, int n, double radius,
                         Rng& rng) {
  const Frame frame = space.canonical_frame(center);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd v = radius * sample_unit_ball(space.dim(), rng);
    pts.push_back(space.exp_map(center, TangentVec{frame.vectors * v}));
  }
  return pts;
}

Marginals make_marginals(const ModelSpace& space, const CheckSpec& spec) {
  const Point x = space.base_point();
  const Point y = space.point_at_distance(x, spec.distance);
  Marginals m;
  if (spec.measure == "dirac") {
    m.mu0 = {x};
    m.mu1 = {y};
    return m;
  }
  require(spec.measure == "cloud", "measure must be dirac or cloud");
  Rng rng(spec.seed, 0xC10D);
  m.mu0 = cloud(space, x, spec.cloud_size, spec.cloud_radius, rng);
  m.mu1 = cloud(space, y, spec.cloud_size, spec.cloud_radius, rng);
  m.dirac = false;
  return m;
}

struct PairedSample {
  std::vector<Point> a;
  std::vector<Point> b;
  std::vector<double> distance;
  long near_antipodal = 0;
};

// Coupled walks started round-robin from the paired support points, so each
// batch whose size is a multiple of the support size samples the mixtures
// P*_{tau1} mu0 and P*_{tau2} mu1 exactly.
PairedSample paired_terminals(const ModelSpace& space, const Marginals& m, double tau1, double tau2,
                              const CheckSpec& spec, int jobs) {
  WalkConfig cfg;
  cfg.k = spec.k;
  cfg.seed = spec.seed;
  cfg.n_trajectories = spec.n_trajectories;
  cfg.validate();
  const auto n = static_cast<std::size_t>(spec.n_trajectories);
  const std::size_t support = m.mu0.size();
  PairedSample out;
  out.a.resize(n);
  out.b.resize(n);
  out.distance.resize(n);
  std::vector<int> antipodal(n, 0);
  parallel_for(n, jobs, [&](std::size_t i) {
    const CoupledWalkPath path =
        run_coupled(space, m.mu0[i % support], m.mu1[i % support], tau1, tau2, cfg, i);
    out.a[i] = path.states.back().x1;
    out.b[i] = path.states.back().x2;
    out.distance[i] = space.geodesic(out.a[i], out.b[i]).length;
    antipodal[i] = path.near_antipodal;
  });
  for (int a : antipodal) out.near_antipodal += a;
  return out;
}

std::size_t batch_size_for(const CheckSpec& spec, std::size_t support) {
  std::size_t b = std::min<std::size_t>(spec.batch_size, kExactSupportCap);
  if (support > 1) b -= b % support;
  require(b >= 1, "batch size smaller than the support size");
  return b;
}

double initial_cost(const ModelSpace& space, const Marginals& m, const CostSpec& cost) {
  if (m.dirac) return cost(space.distance(m.mu0.front(), m.mu1.front()));
  return exact_cost(space, EmpiricalMeasure::uniform(m.mu0), EmpiricalMeasure::uniform(m.mu1), cost)
      .value;
}

std::vector<Point> evaluation_grid(const ModelSpace& space, int n) {
  require(n >= 1, "grid must have at least one point");
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    if (space.kind() == SpaceKind::Sphere) {
      pts.push_back(space.dim() == 1 ? sphere_point(space, 2.0 * std::numbers::pi * u)
                                     : sphere_point(space, std::numbers::pi * u));
    } else {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(space.ambient_dim());
      c(0) = -3.0 + 6.0 * u;
      pts.push_back(space.make_point(c));
    }
  }
  return pts;
}

double conjugate(double p) { return p / (p - 1.0); }

VerificationReport check_bakry_ledoux(const CheckSpec& spec, double p) {
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  VerificationReport rep = base_report(spec, cd, space);
  rep.p = p;
  require(p > 1.0, "Bakry-Ledoux check: p must exceed 1");
  const HeatBackend backend = HeatBackend::deterministic_for(space);
  const TestFunction tf = test_function_by_name(space, spec.function);
  const double ps = conjugate(p);
  const HeatSemigroup pf(space, backend, tf.f);
  const HeatSemigroup pg(space, backend, [&tf, ps](const Point& x) {
    return std::pow(tf.grad_norm(x), ps);
  });
  const double dim_term = cd.finite_dimension() ? cd.N + p - 2.0 : kInfinity;
  const auto grid = evaluation_grid(space, spec.grid);
  bool first = true;
  for (double t : spec.times) {
    require(t > spec.dt, "Bakry-Ledoux check: every time must exceed dt");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double g = pf.grad(t, grid[i], spec.h).value;
      const double lhs = g * g;
      double rhs = std::exp(-2.0 * cd.K * t) * std::pow(std::max(0.0, pg.apply(t, grid[i]).value), 2.0 / ps);
      if (dim_term < kInfinity) {
        const double gen = pf.generator(t, grid[i], spec.dt).value;
        rhs -= contraction_gap(cd.K, t) / dim_term * gen * gen;
      }
      if (first || rhs - lhs < rep.rhs - rep.lhs) {
        rep.lhs = lhs;
        rep.rhs = rhs;
        rep.t = t;
        rep.metadata["worst_point"] = static_cast<double>(i);
        first = false;
      }
    }
  }
  rep.metadata["grid"] = static_cast<double>(grid.size());
  finish(rep, spec);
  return rep;
}

}  // namespace

std::string to_string(CheckId id) {
  for (const auto& c : kChecks) {
    if (c.id == id) return c.name;
  }
  return "unknown";
}

CheckId check_id_from_string(const std::string& name) {
  for (const auto& c : kChecks) {
    if (name == c.name) return c.id;
  }
  throw std::invalid_argument("unknown inequality id: " + name);
}

bool is_statistical(CheckId id) {
  for (const auto& c : kChecks) {
    if (c.id == id) return c.statistical;
  }
  return false;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ModelSpace SpaceSpec::build() const {
  if (kind == "euclidean") return ModelSpace::euclidean(dim);
  if (kind == "sphere") return ModelSpace::sphere(dim, radius);
  if (kind == "hyperbolic") return ModelSpace::hyperbolic(dim, curvature);
  if (kind == "ou") return ModelSpace::ornstein_uhlenbeck(dim, lambda);
  throw std::invalid_argument("unknown space kind: " + kind);
}

CurvatureDimension CheckSpec::curvature_dimension() const {
  const ModelSpace sp = space.build();
  CurvatureDimension cd = N ? sp.curvature_dimension(*N) : sp.curvature_dimension();
  if (K) {
    cd.K = *K;
  } else if (sp.kind() == SpaceKind::Sphere && cd.K > 0.0 && is_statistical(id)) {
    cd.K *= k_fallback;
  }
  return cd;
}

void CheckSpec::validate() const {
  require(p > 1.0 && std::isfinite(p), "p must lie in (1, inf)");
  require(beta > 1.0 && beta <= p, "beta must lie in (1, p]");
  require(s >= 0.0 && t >= 0.0, "times must be nonnegative");
  require(tau1 > 0.0 && tau2 > 0.0, "tau1 and tau2 must be positive");
  require(distance >= 0.0, "distance must be nonnegative");
  require(n_trajectories >= 1 && k >= 1, "n_trajectories and k must be positive");
  require(z > 0.0 && epsilon >= 0.0, "tolerances must be nonnegative");
  require(h > 0.0 && dt > 0.0 && delta > 0.0, "h, dt and delta must be positive");
  require(k_fallback > 0.0 && k_fallback <= 1.0, "k_fallback must lie in (0, 1]");
  require(!times.empty(), "times must not be empty");
  space.build();
}

Verdict decide_verdict(double margin, double sigma, bool statistical, double z, double epsilon,
                       double sigma_max) {
  if (!std::isfinite(margin)) return Verdict::Inconclusive;
  const double tol = statistical ? z * sigma : epsilon;
  if (margin < -tol) return Verdict::Fail;
  if (margin < 0.0 && sigma > sigma_max) return Verdict::Inconclusive;
  return Verdict::Pass;
}

Verdict VerificationReport::recomputed_verdict(double z, double epsilon, double sigma_max) const {
  return decide_verdict(rhs - lhs, std::hypot(stderr_lhs, stderr_rhs), statistical, z, epsilon,
                        sigma_max);
}

double w2_control_rhs(const CurvatureDimension& cd, double s, double t, double W, double beta) {
  return std::pow(coeff_A(cd, s, t) * W, beta) + std::pow(j_measure(cd, s, t), beta);
}

VerificationReport check_w2_control(const CheckSpec& spec, int jobs) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "w2_control");
  require(spec.s > 0.0 && spec.s < spec.t, "w2_control: needs 0 < s < t");
  VerificationReport rep = base_report(spec, cd, space);
  const Marginals m = make_marginals(space, spec);
  const PairedSample ps = paired_terminals(space, m, spec.s, spec.t, spec, jobs);
  const CostSpec cost = CostSpec::pth_power(spec.p);
  const CostEstimate est = batched_cost(space, ps.a, ps.b, cost, batch_size_for(spec, m.mu0.size()),
                                        200, spec.seed, jobs);
  const double q = spec.beta / spec.p;
  auto power = [q](double x) { return std::pow(std::max(0.0, x), q); };
  rep.lhs = power(est.value);
  rep.stderr_lhs = secant_sigma(power, est.value, est.std_error);
  const double w0 = std::pow(initial_cost(space, m, cost), 1.0 / spec.p);
  rep.rhs = w2_control_rhs(cd, spec.s, spec.t, w0, spec.beta);
  rep.metadata["batches"] = static_cast<double>(est.batch_values.size());
  rep.metadata["near_antipodal"] = static_cast<double>(ps.near_antipodal);
  finish(rep, spec);
  return rep;
}

VerificationReport check_swc(const CheckSpec& spec, int jobs) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "swc");
  require(spec.s <= spec.t && spec.t > 0.0, "swc: needs 0 <= s <= t, t > 0");
  require_diameter(space, cd);
  VerificationReport rep = base_report(spec, cd, space);
  const double kappa = cd.K / cd.N;
  const Marginals m = make_marginals(space, spec);
  const PairedSample ps = paired_terminals(space, m, spec.s, spec.t, spec, jobs);
  const CostSpec cost = CostSpec::pth_power(2.0);
  const CostEstimate est = batched_cost(space, ps.a, ps.b, cost, batch_size_for(spec, m.mu0.size()),
                                        200, spec.seed, jobs);
  auto sin2 = [kappa](double w2) {
    const double v = comp_s(kappa, 0.5 * std::sqrt(std::max(0.0, w2)));
    return v * v;
  };
  rep.lhs = sin2(est.value);
  rep.stderr_lhs = secant_sigma(sin2, est.value, est.std_error);
  const double st = spec.s + spec.t;
  const double gap = std::sqrt(spec.t) - std::sqrt(spec.s);
  rep.rhs = std::exp(-cd.K * st) * sin2(initial_cost(space, m, cost)) +
            0.5 * cd.N * one_minus_exp_over(cd.K * st) * gap * gap;
  rep.metadata["near_antipodal"] = static_cast<double>(ps.near_antipodal);
  finish(rep, spec);
  return rep;
}

namespace {

struct CoupledMoment {
  double value = 0.0;  // E[d^p]^{2/p}
  double std_error = 0.0;
  long near_antipodal = 0;
};

CoupledMoment coupled_moment(const ModelSpace& space, const CheckSpec& spec, double tau1,
                             double tau2, int jobs) {
  require(spec.measure == "dirac", "coupled-walk checks use Dirac initial data");
  const Marginals m = make_marginals(space, spec);
  const PairedSample ps = paired_terminals(space, m, tau1, tau2, spec, jobs);
  std::vector<double> dp(ps.distance.size());
  for (std::size_t i = 0; i < dp.size(); ++i) dp[i] = std::pow(ps.distance[i], spec.p);
  const MeanStats st = mean_stats(dp);
  const double e = 2.0 / spec.p;
  auto power = [e](double x) { return std::pow(std::max(0.0, x), e); };
  return {power(st.mean), secant_sigma(power, st.mean, st.std_error), ps.near_antipodal};
}

}  // namespace

VerificationReport check_wp(const CheckSpec& spec, int jobs) {
  spec.validate();
  require(spec.p >= 2.0, "wp: needs p >= 2");
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "wp");
  require(spec.s > 0.0 && spec.s < spec.t, "wp: needs 0 < s < t");
  VerificationReport rep = base_report(spec, cd, space);
  const CoupledMoment cm = coupled_moment(space, spec, spec.s, spec.t, jobs);
  rep.lhs = cm.value;
  rep.stderr_lhs = cm.std_error;
  const CurvatureDimension eff(cd.K, cd.N + spec.p - 2.0);
  rep.rhs = w2_control_rhs(eff, spec.s, spec.t, spec.distance, 2.0);
  rep.metadata["near_antipodal"] = static_cast<double>(cm.near_antipodal);
  finish(rep, spec);
  return rep;
}

VerificationReport check_prectl(const CheckSpec& spec, int jobs) {
  spec.validate();
  require(spec.p >= 2.0, "prectl: needs p >= 2");
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "prectl");
  VerificationReport rep = base_report(spec, cd, space);
  const CoupledMoment cm = coupled_moment(space, spec, spec.tau1, spec.tau2, jobs);
  rep.lhs = cm.value;
  rep.stderr_lhs = cm.std_error;
  const double ts = tau_star(spec.tau1, spec.tau2, cd.K);
  const double gap = std::sqrt(spec.tau2) - std::sqrt(spec.tau1);
  const double d = spec.distance;
  rep.rhs = std::exp(-2.0 * cd.K * ts) * d * d +
            (cd.N + spec.p - 2.0) * 2.0 * one_minus_exp_over(2.0 * cd.K * ts) * gap * gap;
  rep.metadata["tau_star"] = ts;
  rep.metadata["near_antipodal"] = static_cast<double>(cm.near_antipodal);
  finish(rep, spec);
  return rep;
}

VerificationReport check_bl0(const CheckSpec& spec) {
  spec.validate();
  return check_bakry_ledoux(spec, 2.0);
}

VerificationReport check_blp(const CheckSpec& spec) {
  spec.validate();
  return check_bakry_ledoux(spec, spec.p);
}

VerificationReport check_bl_int(const CheckSpec& spec) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "bl_int");
  require(spec.s <= spec.t, "bl_int: needs s <= t");
  VerificationReport rep = base_report(spec, cd, space);
  const HeatBackend backend = HeatBackend::deterministic_for(space);
  const TestFunction tf = test_function_by_name(space, spec.function);
  const double ps = conjugate(spec.p);
  const HeatSemigroup pf(space, backend, tf.f);
  const HeatSemigroup pg(space, backend, [&tf, ps](const Point& x) {
    return std::pow(tf.grad_norm(x), ps);
  });
  const Point x = space.point_at_distance(space.base_point(), 0.5);
  const Point y = space.point_at_distance(x, spec.distance);
  const double d = space.distance(x, y);
  rep.lhs = std::abs(pf.apply(spec.t, y).value - pf.apply(spec.s, x).value);
  const CoefficientFamily fam =
      CoefficientFamily::BakryLedoux(CurvatureDimension(cd.K, cd.N + spec.p - 2.0));
  const QuadratureRule gl = gauss_legendre(128);
  double integral = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double r = 0.5 * (gl.nodes[i] + 1.0);
    const double xi = r * spec.t + (1.0 - r) * spec.s;
    const double speed = spec.t > spec.s ? (spec.t - spec.s) / fam.b(xi) : 0.0;
    const double weight = std::pow(std::pow(fam.a(xi) * d, spec.beta) + std::pow(speed, spec.beta),
                                   1.0 / spec.beta);
    const double g = pg.apply(xi, space.geodesic_point(x, y, r)).value;
    integral += 0.5 * gl.weights[i] * weight * std::pow(std::max(0.0, g), 1.0 / ps);
  }
  rep.rhs = integral;
  rep.metadata["distance"] = d;
  finish(rep, spec);
  return rep;
}

VerificationReport check_gamma2(const CheckSpec& spec) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  VerificationReport rep = base_report(spec, cd, space);
  const TestFunction tf = test_function_by_name(space, spec.function);
  const double h = spec.h;
  const double rho = space.kind() == SpaceKind::Sphere ? space.radius() : 1.0;
  const bool zonal = space.kind() == SpaceKind::Sphere && space.dim() == 2;
  const bool line = (space.kind() == SpaceKind::Euclidean && space.dim() == 1) ||
                    (space.kind() == SpaceKind::Sphere && space.dim() == 1);
  require(zonal || line, "gamma2: supports Euclidean m=1, the circle and the zonal 2-sphere");
  if (zonal) require(tf.zonal, "gamma2: the 2-sphere case needs a zonal function");

  using Fn = std::function<double(double)>;
  // Profile in the natural coordinate: arc length on lines, polar angle on the sphere.
  const Fn prof = [&](double u) {
    if (space.kind() == SpaceKind::Euclidean) return tf.f(Point{Eigen::VectorXd::Constant(1, u)});
    return tf.f(sphere_point(space, zonal ? u : u / rho));
  };
  auto d1 = [h](const Fn& g) { return Fn([g, h](double u) { return (g(u + h) - g(u - h)) / (2.0 * h); }); };
  auto d2 = [h](const Fn& g) {
    return Fn([g, h](double u) { return (g(u + h) - 2.0 * g(u) + g(u - h)) / (h * h); });
  };
  const double scale = zonal ? rho : 1.0;
  // |grad g|^2 and L g for profiles in the chosen coordinate.
  auto grad_sq = [&](const Fn& g) {
    const Fn dg = d1(g);
    return Fn([dg, scale](double u) { const double v = dg(u) / scale; return v * v; });
  };
  auto lap = [&](const Fn& g) {
    const Fn dg = d1(g);
    const Fn ddg = d2(g);
    return Fn([dg, ddg, scale, zonal](double u) {
      double v = ddg(u);
      if (zonal) v += std::cos(u) / std::sin(u) * dg(u);
      return v / (scale * scale);
    });
  };
  const Fn gsq = grad_sq(prof);
  const Fn lf = lap(prof);
  const Fn df = d1(prof);
  const Fn dlf = d1(lf);
  const Fn lgsq = lap(gsq);
  const Fn dgsq = d1(gsq);

  const double dim_term = cd.finite_dimension() ? cd.N + spec.p - 2.0 : kInfinity;
  const double coef = (spec.p - 2.0) / (4.0 * (spec.p - 1.0));
  double lo = 0.0;
  double hi = 0.0;
  if (zonal) {
    lo = 0.1;
    hi = std::numbers::pi - 0.1;
  } else if (space.kind() == SpaceKind::Sphere) {
    hi = 2.0 * std::numbers::pi * rho;
  } else {
    lo = -3.0;
    hi = 3.0;
  }
  bool first = true;
  for (int i = 0; i < spec.grid; ++i) {
    const double u = lo + (hi - lo) * (i + 0.5) / spec.grid;
    const double g2 = gsq(u);
    const double lfu = lf(u);
    const double gamma2 = 0.5 * lgsq(u) - (df(u) / scale) * (dlf(u) / scale);
    const double ricci = gamma2 - cd.K * g2 - (dim_term < kInfinity ? lfu * lfu / dim_term : 0.0);
    const double big = (g2 + spec.delta) * ricci;
    const double slope = dgsq(u) / scale;
    const double small = coef * slope * slope;
    if (first || big - small < rep.rhs - rep.lhs) {
      rep.lhs = small;
      rep.rhs = big;
      rep.metadata["worst_coordinate"] = u;
      first = false;
    }
  }
  finish(rep, spec);
  return rep;
}

VerificationReport check_laplacian_comparison(const CheckSpec& spec) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "laplacian_comparison");
  require(spec.distance > 0.0, "laplacian_comparison: needs x != y");
  if (space.kind() == SpaceKind::Sphere) {
    require(spec.distance < space.diameter() * (1.0 - 1e-3),
            "laplacian_comparison: pair is too close to the cut locus");
  }
  VerificationReport rep = base_report(spec, cd, space);
  const Point x = space.base_point();
  const Point y = space.point_at_distance(x, spec.distance);
  const double d0 = space.distance(y, x);
  const Frame frame = space.canonical_frame(x);
  const double h = spec.h;
  double lap = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const TangentVec e{frame.vectors.col(i) * h};
    const TangentVec me{-frame.vectors.col(i) * h};
    lap += (space.distance(y, space.exp_map(x, e)) - 2.0 * d0 + space.distance(y, space.exp_map(x, me))) /
           (h * h);
  }
  const Geodesic g = space.geodesic(x, y);
  lap -= space.inner(space.drift(x).coords, g.direction.coords);
  rep.lhs = lap;
  const double kappa = cd.K / cd.N;
  rep.rhs = cd.N * comp_c(kappa, d0) / comp_s(kappa, d0);
  const double sec = space.curvature();
  rep.metadata["closed_form_lhs"] = (space.dim() - 1) * comp_c(sec, d0) / comp_s(sec, d0);
  finish(rep, spec);
  return rep;
}

VerificationReport check_lp2(const CheckSpec& spec, int jobs) {
  spec.validate();
  require(spec.p >= 2.0, "lp2: needs p >= 2");
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "lp2");
  require_diameter(space, cd);
  VerificationReport rep = base_report(spec, cd, space);
  const CostSpec cost = CostSpec::comparison(spec.p, cd.kstar());
  const Marginals m = make_marginals(space, spec);
  const PairedSample ps = paired_terminals(space, m, spec.tau1, spec.tau2, spec, jobs);
  const CostEstimate est = batched_cost(space, ps.a, ps.b, cost, batch_size_for(spec, m.mu0.size()),
                                        200, spec.seed, jobs);
  const double e = 2.0 / spec.p;
  auto power = [e](double x) { return std::pow(std::max(0.0, x), e); };
  rep.lhs = power(est.value);
  rep.stderr_lhs = secant_sigma(power, est.value, est.std_error);
  const double theta = theta_exponent(spec.tau1, spec.tau2, cd, spec.p);
  const double gap = std::sqrt(spec.tau2) - std::sqrt(spec.tau1);
  rep.rhs = std::exp(-theta) * power(initial_cost(space, m, cost)) +
            (cd.N + spec.p - 2.0) * 0.5 * one_minus_exp_over(theta) * gap * gap;
  rep.metadata["theta"] = theta;
  rep.metadata["near_antipodal"] = static_cast<double>(ps.near_antipodal);
  finish(rep, spec);
  return rep;
}

VerificationReport check_wvar_ode(const CheckSpec& spec, int jobs) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  require_finite_n(cd, "wvar_ode");
  require(spec.lambda >= 1.0, "wvar_ode: lambda must be >= 1");
  const double u = spec.t;
  const double du = spec.dt;
  require(u > du, "wvar_ode: needs t > dt");
  VerificationReport rep = base_report(spec, cd, space);
  const double lam = spec.lambda;
  const double kappa = cd.K / cd.N;
  auto sin2 = [kappa](double w2) {
    const double v = comp_s(kappa, 0.5 * std::sqrt(std::max(0.0, w2)));
    return v * v;
  };
  double w2_mid = 0.0;
  if (space.kind() == SpaceKind::Euclidean) {
    require(spec.measure == "dirac", "wvar_ode: the Gaussian oracle needs Dirac data");
    const int m = space.dim();
    const Point x = space.base_point();
    const Point y = space.point_at_distance(x, spec.distance);
    auto w2_at = [&](double v) {
      const double w = gaussian_w2(m, x.coords, y.coords, v / lam, lam * v);
      return w * w;
    };
    rep.lhs = (sin2(w2_at(u + du)) - sin2(w2_at(u - du))) / (2.0 * du);
    w2_mid = w2_at(u);
  } else {
    rep.statistical = true;
    rep.k = spec.k;
    rep.n = spec.n_trajectories;
    const Marginals m = make_marginals(space, spec);
    const CostSpec cost = CostSpec::pth_power(2.0);
    const std::size_t bs = batch_size_for(spec, m.mu0.size());
    auto estimate = [&](double v) {
      const PairedSample ps = paired_terminals(space, m, v / lam, lam * v, spec, jobs);
      return batched_cost(space, ps.a, ps.b, cost, bs, 200, spec.seed, jobs);
    };
    const CostEstimate plus = estimate(u + du);
    const CostEstimate minus = estimate(u - du);
    std::vector<double> diff(plus.batch_values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] = (sin2(plus.batch_values[i]) - sin2(minus.batch_values[i])) / (2.0 * du);
    }
    const MeanStats st = mean_stats(diff);
    rep.lhs = st.mean;
    rep.stderr_lhs = bootstrap_std_error(diff, 200, spec.seed);
    w2_mid = 0.5 * (plus.value + minus.value);
  }
  const double sum = lam + 1.0 / lam;
  rep.rhs = -cd.K * sum * sin2(w2_mid) + 0.5 * cd.N * (sum - 2.0);
  const double w = std::sqrt(w2_mid);
  double prev = 0.0;
  for (double hh : {1e-2, 1e-3}) {
    const SwcReparam sr = swc_reparam(w, lam, hh, cd);
    const double res = swc_theta_ode_residual(sr);
    rep.metadata[hh == 1e-2 ? "theta_residual_h1e-2" : "theta_residual_h1e-3"] = res;
    if (hh == 1e-3 && prev > 0.0 && res > 0.0) rep.metadata["theta_residual_order"] = std::log10(prev / res);
    prev = res;
  }
  rep.metadata["w2"] = w2_mid;
  finish(rep, spec);
  return rep;
}

VerificationReport check_mono_app(const CheckSpec& spec) {
  spec.validate();
  const ModelSpace space = spec.space.build();
  const CurvatureDimension cd = spec.curvature_dimension();
  VerificationReport rep = base_report(spec, cd, space);
  const HeatBackend backend = HeatBackend::deterministic_for(space);
  const TestFunction tf = test_function_by_name(space, spec.function);
  const PointFn g = [&tf](const Point& x) { const double v = tf.f(x); return v * v; };
  const auto grid = evaluation_grid(space, spec.grid);
  bool first = true;
  for (double t : spec.times) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double margin = mono_app_margin(space, backend, g, spec.r, spec.delta, t, grid[i]);
      if (first || margin < rep.rhs - rep.lhs) {
        rep.lhs = 0.0;
        rep.rhs = margin;
        rep.t = t;
        rep.metadata["worst_point"] = static_cast<double>(i);
        first = false;
      }
    }
  }
  finish(rep, spec);
  return rep;
}

VerificationReport run_check(const CheckSpec& spec, int jobs) {
  switch (spec.id) {
    case CheckId::W2Control:
      return check_w2_control(spec, jobs);
    case CheckId::Swc:
      return check_swc(spec, jobs);
    case CheckId::Wp:
      return check_wp(spec, jobs);
    case CheckId::PreCtl:
      return check_prectl(spec, jobs);
    case CheckId::BL0:
      return check_bl0(spec);
    case CheckId::BLp:
      return check_blp(spec);
    case CheckId::BLInt:
      return check_bl_int(spec);
    case CheckId::Gamma2:
      return check_gamma2(spec);
    case CheckId::LaplacianComparison:
      return check_laplacian_comparison(spec);
    case CheckId::Lp2:
      return check_lp2(spec, jobs);
    case CheckId::WvarOde:
      return check_wvar_ode(spec, jobs);
    case CheckId::MonoApp:
      return check_mono_app(spec);
  }
  throw std::invalid_argument("run_check: unknown check");
}

std::vector<VerificationReport> run_suite(const std::vector<CheckSpec>& specs, int jobs) {
  std::vector<VerificationReport> out;
  out.reserve(specs.size());
  for (const CheckSpec& spec : specs) {
    try {
      out.push_back(run_check(spec, jobs));
    } catch (const std::exception& e) {
      VerificationReport r;
      r.id = to_string(spec.id);
      r.label = spec.label;
      r.seed = spec.seed;
      r.statistical = is_statistical(spec.id);
      r.error = e.what();
      r.lhs = r.rhs = r.margin = std::numeric_limits<double>::quiet_NaN();
      r.verdict = Verdict::Inconclusive;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace ctl
