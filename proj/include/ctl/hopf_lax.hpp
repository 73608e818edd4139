#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ctl/manifold.hpp"

namespace ctl {

using ScalarField = Eigen::VectorXd;

/// Finite metric space with an optional neighbor structure for slopes.
struct FiniteMetricSpace {
  Eigen::MatrixXd dist;
  std::vector<std::vector<int>> neighbors;  // empty: all other points
  bool uniform_grid = false;
  bool periodic = false;
  double spacing = 0.0;  // grid step h when uniform_grid

  int size() const { return static_cast<int>(dist.rows()); }
  /// Symmetry, zero diagonal and triangle inequality to `tol`.
  void validate(double tol = 1e-12) const;

  /// n equispaced points on [a, b] with the absolute-value metric.
  static FiniteMetricSpace interval(double a, double b, int n);
  /// n equispaced points on a circle of the given radius with arc-length metric.
  static FiniteMetricSpace circle(int n, double radius = 1.0);
  /// Geodesic distances between the given points of a model space.
  static FiniteMetricSpace from_points(const ModelSpace& space, const std::vector<Point>& points);
  static FiniteMetricSpace from_matrix(Eigen::MatrixXd dist);
};

/// (Q_s f)(x) = min_y f(y) + (s/p)(d(x,y)/s)^p by exhaustive minimization.
ScalarField hopf_lax(const FiniteMetricSpace& space, const ScalarField& f, double s, double p);

/// Discrete local Lipschitz constant: max over neighbors of |g(y) - g(x)|/d(x, y).
ScalarField local_slope(const FiniteMetricSpace& space, const ScalarField& g);

/// max over pairs of |f(x) - f(y)|/d(x, y).
double lipschitz_constant(const FiniteMetricSpace& space, const ScalarField& f);

struct HJResidual {
  ScalarField residual;        // d_s^+ Q_s f + |grad Q_s f|^{p*}/p*
  std::vector<char> included;  // interior, non-kink points
  double max_included() const;
};

/// Hamilton-Jacobi residual on a uniform 1-D grid. `order` selects the forward
/// time difference (1: two-point, 2: three-point); ds <= 0 selects h^2.
HJResidual hj_residual(const FiniteMetricSpace& grid, const ScalarField& f, double s, double p,
                       double ds = 0.0, int order = 1);

struct LipschitzSlack {
  double spatial = 0.0;   // min over x, y of Lip(f) d - |Q_s f(x) - Q_s f(y)|
  double temporal = 0.0;  // min over x of Lip(f)^{p*}/p* |s' - s| - |Q_s' f - Q_s f|
  double monotone = 0.0;  // min over x of Q_{min} f - Q_{max} f
  double worst() const;
};

LipschitzSlack lipschitz_properties_check(const FiniteMetricSpace& space, const ScalarField& f,
                                          double s, double s_prime, double p = 2.0);

struct KantorovichGap {
  double primal = 0.0;  // W_p^p / p
  double dual = 0.0;    // int Q_1 f dnu - int f dmu at the refined potential
  double gap = 0.0;
  ScalarField potential;  // the f attaining `dual`
};

/// Duality gap between W_p^p/p and the Hopf-Lax dual for measures given as
/// weight vectors on the points of `space`.
KantorovichGap kantorovich_gap(const FiniteMetricSpace& space, const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& nu, double p, int refinements = 3);

}  // namespace ctl
