#include "ctl/walk.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ctl {

namespace {

constexpr double kDiagonalTol = 1e-12;

bool near_cut_locus(const ModelSpace& space, const Geodesic& g) {
  if (g.tie_broken) return true;
  return space.kind() == SpaceKind::Sphere && g.length > space.diameter() * (1.0 - 1e-9);
}

}  // namespace

void WalkConfig::validate() const {
  if (k < 1) throw std::invalid_argument("WalkConfig: k must be >= 1");
  if (n_trajectories < 1) throw std::invalid_argument("WalkConfig: n_trajectories must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("WalkConfig: horizon must be positive");
  if (record_stride < 0) throw std::invalid_argument("WalkConfig: record_stride must be >= 0");
}

int WalkConfig::steps() const {
  return std::max(1, static_cast<int>(std::lround(horizon * k * k)));
}

Eigen::VectorXd sample_unit_ball(int m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_unit_ball: m must be >= 1");
  Eigen::VectorXd g = rng.normal_vector(m);
  double n = g.norm();
  while (n == 0.0) {
    g = rng.normal_vector(m);
    n = g.norm();
  }
  const double r = std::pow(rng.uniform(), 1.0 / m);
  return g * (r / n);
}

CoupledState step_coupled(const ModelSpace& space, const CoupledState& state, double tau1,
                          double tau2, int k, Rng& rng, FramePolicy policy,
                          int* near_antipodal) {
  if (!(tau1 >= 0.0 && tau2 >= 0.0)) throw std::invalid_argument("step_coupled: taus must be nonnegative");
  if (k < 1) throw std::invalid_argument("step_coupled: k must be >= 1");
  const int m = space.dim();
  const Frame phi1 = policy == FramePolicy::Section ? space.canonical_frame(state.x1) : state.frame1;
  const Eigen::VectorXd zeta = sample_unit_ball(m, rng);
  const TangentVec noise1{std::sqrt(2.0 * (m + 2)) * (phi1.vectors * zeta)};

  const Geodesic g = space.geodesic(state.x1, state.x2);
  TangentVec noise2 = noise1;
  if (g.length >= kDiagonalTol) {
    if (near_antipodal && near_cut_locus(space, g)) ++*near_antipodal;
    noise2 = space.parallel_transport(state.x1, state.x2, noise1);
  }

  const double inv_k = 1.0 / k;
  const double inv_k2 = inv_k * inv_k;
  const TangentVec v1{std::sqrt(tau1) * inv_k * noise1.coords +
                      tau1 * inv_k2 * space.drift(state.x1).coords};
  const TangentVec v2{std::sqrt(tau2) * inv_k * noise2.coords +
                      tau2 * inv_k2 * space.drift(state.x2).coords};

  CoupledState next;
  next.x1 = space.exp_map(state.x1, v1);
  next.x2 = space.exp_map(state.x2, v2);
  if (policy == FramePolicy::Carried) {
    next.frame1.base = next.x1;
    next.frame1.vectors.resize(phi1.vectors.rows(), phi1.vectors.cols());
    for (int j = 0; j < phi1.vectors.cols(); ++j) {
      next.frame1.vectors.col(j) =
          space.transport_along(state.x1, v1, TangentVec{phi1.vectors.col(j)}).coords;
    }
  } else {
    next.frame1 = Frame{next.x1, Eigen::MatrixXd()};
  }
  return next;
}

CoupledWalkPath run_coupled(const ModelSpace& space, const Point& x, const Point& y, double tau1,
                            double tau2, const WalkConfig& cfg, std::uint64_t trajectory) {
  cfg.validate();
  space.validate(x);
  space.validate(y);
  Rng rng(cfg.seed, trajectory);
  CoupledWalkPath path;
  path.tau1 = tau1;
  path.tau2 = tau2;
  CoupledState state{x, y, space.canonical_frame(x)};
  const int n = cfg.steps();
  const double dt = 1.0 / (static_cast<double>(cfg.k) * cfg.k);
  path.states.push_back(state);
  path.times.push_back(0.0);
  int antipodal = 0;
  for (int i = 1; i <= n; ++i) {
    state = step_coupled(space, state, tau1, tau2, cfg.k, rng, cfg.frame_policy, &antipodal);
    if (i == n || (cfg.record_stride > 0 && i % cfg.record_stride == 0)) {
      path.states.push_back(state);
      path.times.push_back(i * dt);
    }
  }
  path.near_antipodal = antipodal;
  return path;
}

std::vector<Point> run_single(const ModelSpace& space, const Point& x, double tau,
                              const WalkConfig& cfg, std::uint64_t trajectory) {
  if (!(tau > 0.0)) throw std::invalid_argument("run_single: tau must be positive");
  cfg.validate();
  space.validate(x);
  Rng rng(cfg.seed, trajectory);
  const int m = space.dim();
  const int n = cfg.steps();
  const double inv_k = 1.0 / cfg.k;
  std::vector<Point> out{x};
  Point cur = x;
  Frame carried = space.canonical_frame(x);
  for (int i = 1; i <= n; ++i) {
    const Frame phi = cfg.frame_policy == FramePolicy::Section ? space.canonical_frame(cur) : carried;
    const Eigen::VectorXd zeta = sample_unit_ball(m, rng);
    const TangentVec v{std::sqrt(tau) * inv_k * std::sqrt(2.0 * (m + 2)) * (phi.vectors * zeta) +
                       tau * inv_k * inv_k * space.drift(cur).coords};
    if (cfg.frame_policy == FramePolicy::Carried) {
      for (int j = 0; j < m; ++j) {
        carried.vectors.col(j) = space.transport_along(cur, v, TangentVec{phi.vectors.col(j)}).coords;
      }
    }
    cur = space.exp_map(cur, v);
    if (i == n || (cfg.record_stride > 0 && i % cfg.record_stride == 0)) out.push_back(cur);
  }
  return out;
}

CoupledTerminals sample_coupled_terminals(const ModelSpace& space, const Point& x, const Point& y,
                                          double tau1, double tau2, const WalkConfig& cfg,
                                          int jobs) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_trajectories);
  CoupledTerminals out;
  out.x1.resize(n);
  out.x2.resize(n);
  out.distance.resize(n);
  std::vector<int> antipodal(n, 0);
  WalkConfig terminal_only = cfg;
  terminal_only.record_stride = 0;
  parallel_for(n, jobs, [&](std::size_t i) {
    const CoupledWalkPath path = run_coupled(space, x, y, tau1, tau2, terminal_only, i);
    const CoupledState& end = path.states.back();
    out.x1[i] = end.x1;
    out.x2[i] = end.x2;
    out.distance[i] = space.geodesic(end.x1, end.x2).length;
    antipodal[i] = path.near_antipodal;
  });
  for (int a : antipodal) out.near_antipodal += a;
  return out;
}

std::vector<Point> sample_single_terminals(const ModelSpace& space, const Point& x, double tau,
                                           const WalkConfig& cfg, int jobs) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_trajectories);
  std::vector<Point> out(n);
  WalkConfig terminal_only = cfg;
  terminal_only.record_stride = 0;
  parallel_for(n, jobs, [&](std::size_t i) { out[i] = run_single(space, x, tau, terminal_only, i).back(); });
  return out;
}

void write_trajectory_csv(std::ostream& out, const ModelSpace& space,
                          const std::vector<CoupledWalkPath>& paths) {
  const int d = space.ambient_dim();
  out << "trajectory_id,step,t";
  for (int i = 0; i < d; ++i) out << ",x1_" << i;
  for (int i = 0; i < d; ++i) out << ",x2_" << i;
  out << ",distance\n";
  out.precision(17);
  for (std::size_t id = 0; id < paths.size(); ++id) {
    const auto& p = paths[id];
    for (std::size_t s = 0; s < p.states.size(); ++s) {
      out << id << ',' << s << ',' << p.times[s];
      for (int i = 0; i < d; ++i) out << ',' << p.states[s].x1.coords(i);
      for (int i = 0; i < d; ++i) out << ',' << p.states[s].x2.coords(i);
      out << ',' << space.geodesic(p.states[s].x1, p.states[s].x2).length << '\n';
    }
  }
}

}  // namespace ctl
