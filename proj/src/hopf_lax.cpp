#include "ctl/hopf_lax.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ctl/network_simplex.hpp"

namespace ctl {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double conjugate(double p) { return p / (p - 1.0); }

}  // namespace

void FiniteMetricSpace::validate(double tol) const {
  const int n = size();
  require(dist.cols() == n && n > 0, "FiniteMetricSpace: distance matrix must be square");
  for (int i = 0; i < n; ++i) {
    require(dist(i, i) == 0.0, "FiniteMetricSpace: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      require(std::abs(dist(i, j) - dist(j, i)) <= tol, "FiniteMetricSpace: asymmetric distances");
      require(i == j || dist(i, j) > 0.0, "FiniteMetricSpace: distinct points at distance 0");
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        require(dist(i, j) <= dist(i, k) + dist(k, j) + tol,
                "FiniteMetricSpace: triangle inequality violated");
      }
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::interval(double a, double b, int n) {
  require(n >= 2 && b > a, "interval grid: need n >= 2 and a < b");
  FiniteMetricSpace g;
  g.spacing = (b - a) / (n - 1);
  g.uniform_grid = true;
  g.dist.resize(n, n);
  g.neighbors.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g.dist(i, j) = std::abs(i - j) * g.spacing;
    if (i > 0) g.neighbors[i].push_back(i - 1);
    if (i + 1 < n) g.neighbors[i].push_back(i + 1);
  }
  return g;
}

FiniteMetricSpace FiniteMetricSpace::circle(int n, double radius) {
  require(n >= 3 && radius > 0.0, "circle grid: need n >= 3 and positive radius");
  FiniteMetricSpace g;
  g.spacing = 2.0 * std::numbers::pi * radius / n;
  g.uniform_grid = true;
  g.periodic = true;
  g.dist.resize(n, n);
  g.neighbors.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = std::abs(i - j);
      g.dist(i, j) = std::min(k, n - k) * g.spacing;
    }
    g.neighbors[i] = {(i + n - 1) % n, (i + 1) % n};
  }
  return g;
}

FiniteMetricSpace FiniteMetricSpace::from_points(const ModelSpace& space,
                                                 const std::vector<Point>& points) {
  FiniteMetricSpace g;
  const auto n = static_cast<Eigen::Index>(points.size());
  g.dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g.dist(i, j) = g.dist(j, i) = space.distance(points[i], points[j]);
    }
  }
  return g;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(Eigen::MatrixXd dist) {
  FiniteMetricSpace g;
  g.dist = std::move(dist);
  return g;
}

ScalarField hopf_lax(const FiniteMetricSpace& space, const ScalarField& f, double s, double p) {
  require(s > 0.0, "hopf_lax: s must be positive");
  require(p > 1.0, "hopf_lax: p must exceed 1");
  require(f.size() == space.size(), "hopf_lax: field size mismatch");
  require(f.allFinite(), "hopf_lax: field must be finite");
  const int n = space.size();
  ScalarField q(n);
  const double scale = s / p;
  for (int i = 0; i < n; ++i) {
    double best = f(i);
    for (int j = 0; j < n; ++j) {
      const double v = f(j) + scale * std::pow(space.dist(i, j) / s, p);
      best = std::min(best, v);
    }
    q(i) = best;
  }
  return q;
}

ScalarField local_slope(const FiniteMetricSpace& space, const ScalarField& g) {
  const int n = space.size();
  ScalarField out = ScalarField::Zero(n);
  for (int i = 0; i < n; ++i) {
    auto visit = [&](int j) {
      if (j != i) out(i) = std::max(out(i), std::abs(g(j) - g(i)) / space.dist(i, j));
    };
    if (space.neighbors.empty()) {
      for (int j = 0; j < n; ++j) visit(j);
    } else {
      for (int j : space.neighbors[i]) visit(j);
    }
  }
  return out;
}

double lipschitz_constant(const FiniteMetricSpace& space, const ScalarField& f) {
  double lip = 0.0;
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      lip = std::max(lip, std::abs(f(i) - f(j)) / space.dist(i, j));
    }
  }
  return lip;
}

double HJResidual::max_included() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) {
    if (included[i]) worst = std::max(worst, std::abs(residual(i)));
  }
  return worst;
}

HJResidual hj_residual(const FiniteMetricSpace& grid, const ScalarField& f, double s, double p,
                       double ds, int order) {
  require(grid.uniform_grid, "hj_residual: needs a uniform 1-D grid");
  require(grid.size() >= 16, "hj_residual: grid too coarse (n < 16)");
  require(order == 1 || order == 2, "hj_residual: order must be 1 or 2");
  const double h = grid.spacing;
  if (ds <= 0.0) ds = h * h;
  require(s > ds, "hj_residual: need s > ds > 0");
  const int n = grid.size();
  const double ps = conjugate(p);
  const ScalarField q0 = hopf_lax(grid, f, s, p);
  const ScalarField q1 = hopf_lax(grid, f, s + ds, p);
  ScalarField dq;
  if (order == 1) {
    dq = (q1 - q0) / ds;
  } else {
    const ScalarField q2 = hopf_lax(grid, f, s + 2.0 * ds, p);
    dq = (-3.0 * q0 + 4.0 * q1 - q2) / (2.0 * ds);
  }
  const ScalarField slope = local_slope(grid, q0);

  HJResidual out;
  out.residual = dq + slope.array().pow(ps).matrix() / ps;
  out.included.assign(n, 1);
  // Boundary layer of the interval: minimizers may be cut off by the ends.
  if (!grid.periodic) {
    const double lip = lipschitz_constant(grid, f);
    const double reach = s * std::pow(std::max(lip, 1e-300), 1.0 / (p - 1.0)) + 10.0 * h;
    for (int i = 0; i < n; ++i) {
      if (i * h < reach || (n - 1 - i) * h < reach) out.included[i] = 0;
    }
  }
  // Kinks: one-sided slopes differing by more than 10h.
  for (int i = 0; i < n; ++i) {
    const bool has_left = grid.periodic || i > 0;
    const bool has_right = grid.periodic || i + 1 < n;
    if (!has_left || !has_right) {
      out.included[i] = 0;
      continue;
    }
    const double left = (q0(i) - q0((i + n - 1) % n)) / h;
    const double right = (q0((i + 1) % n) - q0(i)) / h;
    if (std::abs(right - left) > 10.0 * h) out.included[i] = 0;
  }
  return out;
}

double LipschitzSlack::worst() const { return std::min({spatial, temporal, monotone}); }

LipschitzSlack lipschitz_properties_check(const FiniteMetricSpace& space, const ScalarField& f,
                                          double s, double s_prime, double p) {
  require(s > 0.0 && s_prime > 0.0, "lipschitz_properties_check: times must be positive");
  const double lip = lipschitz_constant(space, f);
  const double ps = conjugate(p);
  const ScalarField qs = hopf_lax(space, f, s, p);
  const ScalarField qt = hopf_lax(space, f, s_prime, p);
  LipschitzSlack out;
  out.spatial = std::numeric_limits<double>::infinity();
  out.temporal = std::numeric_limits<double>::infinity();
  out.monotone = std::numeric_limits<double>::infinity();
  const int n = space.size();
  const double tbound = std::pow(lip, ps) / ps * std::abs(s_prime - s);
  const ScalarField& early = s <= s_prime ? qs : qt;
  const ScalarField& late = s <= s_prime ? qt : qs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out.spatial = std::min(out.spatial, lip * space.dist(i, j) - std::abs(qs(i) - qs(j)));
    }
    out.temporal = std::min(out.temporal, tbound - std::abs(qt(i) - qs(i)));
    out.monotone = std::min(out.monotone, early(i) - late(i));
  }
  if (n < 2) out.spatial = 0.0;
  return out;
}

KantorovichGap kantorovich_gap(const FiniteMetricSpace& space, const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& nu, double p, int refinements) {
  require(p > 1.0, "kantorovich_gap: p must exceed 1");
  const int n = space.size();
  require(mu.size() == n && nu.size() == n, "kantorovich_gap: measure size mismatch");
  const Eigen::MatrixXd cost = space.dist.array().pow(p) / p;
  const TransportSolution lp = solve_transport(mu, nu, cost);

  // Q_1 f(y) = min_x f(x) + d(x, y)^p / p: with f = -phi this is phi^c.
  ScalarField f = -lp.phi;
  auto dual_of = [&](const ScalarField& g) {
    const ScalarField q = hopf_lax(space, g, 1.0, p);
    return nu.dot(q) - mu.dot(g);
  };
  double best = dual_of(f);
  ScalarField best_f = f;
  for (int r = 0; r < refinements; ++r) {
    const ScalarField q = hopf_lax(space, f, 1.0, p);
    // Largest f with f(x) + c(x, y) >= q(y): f(x) = max_y q(y) - c(x, y).
    for (int i = 0; i < n; ++i) f(i) = (q.transpose() - cost.row(i)).maxCoeff();
    const double v = dual_of(f);
    if (v > best) {
      best = v;
      best_f = f;
    }
  }
  KantorovichGap out;
  out.primal = lp.cost;
  out.dual = best;
  out.gap = lp.cost - best;
  out.potential = best_f;
  return out;
}

}  // namespace ctl
