#include "ctl/heat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctl {

namespace {

constexpr int kCircleSamples = 256;
constexpr int kLegendreNodes = 1024;

int default_nodes(int m) {
  switch (m) {
    case 1:
      return 64;
    case 2:
      return 40;
    case 3:
      return 20;
    default:
      return 8;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::vector<double> legendre_values(int n, double u) {
  std::vector<double> p(n);
  if (n > 0) p[0] = 1.0;
  if (n > 1) p[1] = u;
  for (int l = 2; l < n; ++l) p[l] = ((2 * l - 1) * u * p[l - 1] - (l - 1) * p[l - 2]) / l;
  return p;
}

HeatBackend HeatBackend::monte_carlo(const WalkConfig& cfg) {
  HeatBackend b;
  b.kind = BackendKind::MonteCarlo;
  b.walk = cfg;
  return b;
}

HeatBackend HeatBackend::euclidean_gaussian(int nodes) {
  HeatBackend b;
  b.kind = BackendKind::EuclideanGaussian;
  b.quadrature_nodes = nodes;
  return b;
}

HeatBackend HeatBackend::circle_fourier(int n_modes) {
  HeatBackend b;
  b.kind = BackendKind::CircleFourier;
  b.n_modes = n_modes;
  return b;
}

HeatBackend HeatBackend::sphere_zonal(int n_modes) {
  HeatBackend b;
  b.kind = BackendKind::SphereZonal;
  b.n_modes = n_modes;
  return b;
}

HeatBackend HeatBackend::ou_mehler(int nodes) {
  HeatBackend b;
  b.kind = BackendKind::OUMehler;
  b.quadrature_nodes = nodes;
  return b;
}

HeatBackend HeatBackend::deterministic_for(const ModelSpace& space) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return euclidean_gaussian();
    case SpaceKind::EuclideanOU:
      return ou_mehler();
    case SpaceKind::Sphere:
      if (space.dim() == 1) return circle_fourier();
      if (space.dim() == 2) return sphere_zonal();
      break;
    case SpaceKind::Hyperbolic:
      break;
  }
  throw std::invalid_argument("no deterministic heat backend for " + space.name());
}

HeatSemigroup::HeatSemigroup(const ModelSpace& space, const HeatBackend& backend, PointFn f)
    : space_(space), backend_(backend), f_(std::move(f)) {
  require(static_cast<bool>(f_), "HeatSemigroup: empty function");
  switch (backend_.kind) {
    case BackendKind::MonteCarlo:
      backend_.walk.validate();
      break;
    case BackendKind::EuclideanGaussian:
    case BackendKind::OUMehler: {
      const bool ok = backend_.kind == BackendKind::EuclideanGaussian
                          ? space_.kind() == SpaceKind::Euclidean
                          : space_.kind() == SpaceKind::EuclideanOU;
      require(ok, "HeatSemigroup: Gaussian backends need the matching flat space");
      const int n = backend_.quadrature_nodes > 0 ? backend_.quadrature_nodes : default_nodes(space_.dim());
      gauss_ = gauss_hermite_probabilists(n);
      break;
    }
    case BackendKind::CircleFourier: {
      require(space_.kind() == SpaceKind::Sphere && space_.dim() == 1,
              "HeatSemigroup: CircleFourier needs the circle");
      require(backend_.n_modes >= 8 && backend_.n_modes <= kCircleSamples / 2,
              "HeatSemigroup: CircleFourier mode count must lie in [8, 128]");
      cos_coeffs_.assign(backend_.n_modes, 0.0);
      sin_coeffs_.assign(backend_.n_modes, 0.0);
      for (int j = 0; j < kCircleSamples; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / kCircleSamples;
        const double v = f_(sphere_point(space_, phi));
        for (int k = 0; k < backend_.n_modes; ++k) {
          cos_coeffs_[k] += v * std::cos(k * phi);
          sin_coeffs_[k] += v * std::sin(k * phi);
        }
      }
      for (int k = 0; k < backend_.n_modes; ++k) {
        const double scale = (k == 0 ? 1.0 : 2.0) / kCircleSamples;
        cos_coeffs_[k] *= scale;
        sin_coeffs_[k] *= scale;
      }
      break;
    }
    case BackendKind::SphereZonal: {
      require(space_.kind() == SpaceKind::Sphere && space_.dim() == 2,
              "HeatSemigroup: SphereZonal needs the 2-sphere");
      require(backend_.n_modes >= 8, "HeatSemigroup: SphereZonal needs at least 8 modes");
      for (double theta : {0.3, 1.1, 2.0, 2.9}) {
        const double ref = f_(sphere_point(space_, theta, 0.0));
        for (double phi : {1.0, 2.5, 4.0}) {
          const double v = f_(sphere_point(space_, theta, phi));
          require(std::abs(v - ref) <= 1e-9 * std::max(1.0, std::abs(ref)),
                  "HeatSemigroup: SphereZonal needs a zonal function");
        }
      }
      const QuadratureRule gl = gauss_legendre(kLegendreNodes);
      legendre_coeffs_.assign(backend_.n_modes, 0.0);
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double u = gl.nodes[k];
        const double v = f_(sphere_point(space_, std::acos(u)));
        const auto p = legendre_values(backend_.n_modes, u);
        for (int l = 0; l < backend_.n_modes; ++l) legendre_coeffs_[l] += gl.weights[k] * v * p[l];
      }
      for (int l = 0; l < backend_.n_modes; ++l) legendre_coeffs_[l] *= (2.0 * l + 1.0) / 2.0;
      break;
    }
  }
}

double HeatSemigroup::deterministic_value(double t, const Point& x) const {
  switch (backend_.kind) {
    case BackendKind::EuclideanGaussian:
    case BackendKind::OUMehler: {
      const int m = space_.dim();
      Eigen::VectorXd mean = x.coords;
      double sigma = std::sqrt(2.0 * t);
      if (backend_.kind == BackendKind::OUMehler) {
        const double lambda = space_.ou_rate();
        mean *= std::exp(-lambda * t);
        sigma = std::sqrt(2.0 * t * one_minus_exp_over(2.0 * lambda * t));
      }
      const int n = static_cast<int>(gauss_.nodes.size());
      std::vector<int> idx(m, 0);
      double total = 0.0;
      Point y{mean};
      while (true) {
        double w = 1.0;
        for (int d = 0; d < m; ++d) {
          y.coords(d) = mean(d) + sigma * gauss_.nodes[idx[d]];
          w *= gauss_.weights[idx[d]];
        }
        total += w * f_(y);
        int d = 0;
        while (d < m && ++idx[d] == n) idx[d++] = 0;
        if (d == m) break;
      }
      return total;
    }
    case BackendKind::CircleFourier: {
      const double phi = circle_angle(x);
      const double r2 = space_.radius() * space_.radius();
      double v = 0.0;
      for (int k = 0; k < backend_.n_modes; ++k) {
        v += std::exp(-k * k * t / r2) * (cos_coeffs_[k] * std::cos(k * phi) + sin_coeffs_[k] * std::sin(k * phi));
      }
      return v;
    }
    case BackendKind::SphereZonal: {
      const double u = std::clamp(x.coords(2) / space_.radius(), -1.0, 1.0);
      const double r2 = space_.radius() * space_.radius();
      const auto p = legendre_values(backend_.n_modes, u);
      double v = 0.0;
      for (int l = 0; l < backend_.n_modes; ++l) {
        v += legendre_coeffs_[l] * std::exp(-l * (l + 1.0) * t / r2) * p[l];
      }
      return v;
    }
    case BackendKind::MonteCarlo:
      break;
  }
  throw std::logic_error("deterministic_value: Monte Carlo backend");
}

std::vector<double> HeatSemigroup::mc_values(double t, const Point& x) const {
  const auto n = static_cast<std::size_t>(backend_.walk.n_trajectories);
  if (t == 0.0) return std::vector<double>(n, f_(x));
  const std::vector<Point> ends = sample_single_terminals(space_, x, t, backend_.walk);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f_(ends[i]);
  return out;
}

HeatValue HeatSemigroup::apply(double t, const Point& x) const {
  require(t >= 0.0 && std::isfinite(t), "heat_apply: t must be nonnegative");
  space_.validate(x);
  if (t == 0.0) return {f_(x), 0.0};
  if (backend_.deterministic()) return {deterministic_value(t, x), 0.0};
  const MeanStats st = mean_stats(mc_values(t, x));
  return {st.mean, st.std_error};
}

std::vector<TangentVec> HeatSemigroup::directions(const Point& x, double t, double h) const {
  const Frame frame = space_.canonical_frame(x);
  const int m = space_.dim();
  std::vector<TangentVec> dirs;
  for (int i = 0; i < m; ++i) dirs.push_back({frame.vectors.col(i)});
  for (int i = 0; m > 1 && i < m; ++i) {
    dirs.push_back({(frame.vectors.col(i) + frame.vectors.col((i + 1) % m)) / std::sqrt(2.0)});
  }
  const TangentVec toward = space_.log_map(x, space_.base_point());
  const double tn = space_.norm(toward);
  dirs.push_back(tn > 1e-12 ? TangentVec{toward.coords / tn} : dirs.front());
  // Direction of the frame-coordinate gradient estimate.
  if (backend_.deterministic()) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(space_.ambient_dim());
    for (int i = 0; i < m; ++i) {
      const TangentVec e{frame.vectors.col(i)};
      const double plus = deterministic_value(t, space_.exp_map(x, TangentVec{h * e.coords}));
      const double minus = deterministic_value(t, space_.exp_map(x, TangentVec{-h * e.coords}));
      g += (plus - minus) / (2.0 * h) * e.coords;
    }
    const double gn = std::sqrt(std::max(0.0, space_.inner(g, g)));
    dirs.push_back(gn > 0.0 ? TangentVec{g / gn} : dirs.front());
  } else {
    dirs.push_back(dirs.front());
  }
  return dirs;
}

HeatValue HeatSemigroup::grad(double t, const Point& x, double h) const {
  require(t > 0.0, "grad_heat: t must be positive");
  require(h > 0.0, "grad_heat: h must be positive");
  space_.validate(x);
  HeatValue best;
  for (const TangentVec& v : directions(x, t, h)) {
    const Point plus = space_.exp_map(x, TangentVec{h * v.coords});
    const Point minus = space_.exp_map(x, TangentVec{-h * v.coords});
    HeatValue cur;
    if (backend_.deterministic()) {
      cur.value = std::abs(deterministic_value(t, plus) - deterministic_value(t, minus)) / (2.0 * h);
    } else {
      const auto a = mc_values(t, plus);
      const auto b = mc_values(t, minus);
      std::vector<double> diff(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) diff[i] = (a[i] - b[i]) / (2.0 * h);
      const MeanStats st = mean_stats(diff);
      cur = {std::abs(st.mean), st.std_error};
    }
    if (cur.value > best.value) best = cur;
  }
  return best;
}

HeatValue HeatSemigroup::generator(double t, const Point& x, double dt) const {
  require(dt > 0.0 && t > dt, "generator_heat: need t > dt > 0");
  space_.validate(x);
  if (backend_.deterministic()) {
    return {(deterministic_value(t + dt, x) - deterministic_value(t - dt, x)) / (2.0 * dt), 0.0};
  }
  const auto a = mc_values(t + dt, x);
  const auto b = mc_values(t - dt, x);
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = (a[i] - b[i]) / (2.0 * dt);
  const MeanStats st = mean_stats(diff);
  return {st.mean, st.std_error};
}

HeatValue heat_apply(const ModelSpace& space, const HeatBackend& backend, const PointFn& f,
                     double t, const Point& x) {
  return HeatSemigroup(space, backend, f).apply(t, x);
}

HeatValue grad_heat(const ModelSpace& space, const HeatBackend& backend, const PointFn& f, double t,
                    const Point& x, double h) {
  return HeatSemigroup(space, backend, f).grad(t, x, h);
}

HeatValue generator_heat(const ModelSpace& space, const HeatBackend& backend, const PointFn& f,
                         double t, const Point& x, double dt) {
  return HeatSemigroup(space, backend, f).generator(t, x, dt);
}

EmpiricalMeasure heat_sample(const ModelSpace& space, double t, const Point& x, int n,
                             const WalkConfig& cfg, int jobs) {
  require(t >= 0.0, "heat_sample: t must be nonnegative");
  require(n >= 1, "heat_sample: n must be positive");
  space.validate(x);
  if (t == 0.0) return EmpiricalMeasure::uniform(std::vector<Point>(n, x));
  WalkConfig c = cfg;
  c.n_trajectories = n;
  return EmpiricalMeasure::uniform(sample_single_terminals(space, x, t, c, jobs));
}

double mono_app_margin(const ModelSpace& space, const HeatBackend& backend, const PointFn& g,
                       double r, double delta, double t, const Point& x) {
  require(r > 0.0 && r < 1.0, "mono_app_margin: r must lie in (0, 1)");
  require(delta > 0.0, "mono_app_margin: delta must be positive");
  require(backend.deterministic(), "mono_app_margin: needs a deterministic backend");
  const HeatSemigroup shifted(space, backend, [&g, r, delta](const Point& y) {
    return std::pow(std::max(0.0, g(y)) + delta, r);
  });
  const HeatSemigroup plain(space, backend, [&g, r](const Point& y) {
    return std::pow(std::max(0.0, g(y)), r);
  });
  return std::pow(shifted.apply(t, x).value, 1.0 / r) - delta -
         std::pow(plain.apply(t, x).value, 1.0 / r);
}

}  // namespace ctl
