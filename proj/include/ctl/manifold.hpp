#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "ctl/comparison.hpp"

namespace ctl {

/// Malformed coordinates or an operation outside the supported geometry.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A curvature-dimension query the space cannot honor (finite N with drift).
class UnsupportedParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point in the canonical embedding of a model space.
struct Point {
  Eigen::VectorXd coords;
};

/// Tangent vector, in ambient coordinates, at an implied base point.
struct TangentVec {
  Eigen::VectorXd coords;
};

/// Orthonormal frame of T_x M; columns are tangent vectors in ambient coordinates.
struct Frame {
  Point base;
  Eigen::MatrixXd vectors;
};

/// Unit-speed minimal geodesic from x: initial direction and length.
struct Geodesic {
  TangentVec direction;
  double length = 0.0;
  bool tie_broken = false;  // true when x, y are conjugate (sphere antipodes)
};

enum class SpaceKind { Euclidean, Sphere, Hyperbolic, EuclideanOU };

/// Model Riemannian manifold with drift, with closed-form geometry.
///
/// Embeddings: Euclidean and OU use R^m; the sphere of radius rho sits in
/// R^{m+1}; hyperbolic space of curvature c < 0 is the upper sheet of
/// <x, x> = 1/c in Minkowski space R^{m,1} (time coordinate first).
class ModelSpace {
 public:
  static ModelSpace euclidean(int m);
  static ModelSpace sphere(int m, double radius = 1.0);
  static ModelSpace hyperbolic(int m, double curvature = -1.0);
  static ModelSpace ornstein_uhlenbeck(int m, double lambda);

  SpaceKind kind() const { return kind_; }
  int dim() const { return m_; }
  int ambient_dim() const;
  double radius() const;     // sphere radius, or 1/sqrt(-c) on the hyperboloid
  double curvature() const;  // sectional curvature
  double ou_rate() const { return lambda_; }
  std::string name() const;

  /// (K, N) of the Bakry-Emery bound: Euclidean (0, m), sphere ((m-1)/rho^2, m),
  /// hyperbolic (c(m-1), m), OU (lambda, inf).
  CurvatureDimension curvature_dimension() const;
  /// Same bound with a caller-chosen finite N >= m; OU rejects any finite N.
  CurvatureDimension curvature_dimension(double N) const;

  double diameter() const;
  /// Diameter strictly below pi sqrt((N-1)/K) when K > 0; always true otherwise.
  bool satisfies_diameter_condition(const CurvatureDimension& cd) const;
  /// Largest K' = factor^j K (j >= 1) that satisfies the diameter condition.
  CurvatureDimension diameter_fallback(const CurvatureDimension& cd, double factor = 0.9) const;

  /// Ambient metric restricted to tangent vectors (Minkowski on the hyperboloid).
  double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  double norm(const TangentVec& v) const;

  void validate(const Point& x) const;
  void validate_tangent(const Point& x, const TangentVec& v) const;
  /// Pull coordinates back onto the manifold (no-op for flat spaces).
  Point project(const Point& x) const;
  TangentVec project_tangent(const Point& x, const Eigen::VectorXd& v) const;

  double distance(const Point& x, const Point& y) const;
  Geodesic geodesic(const Point& x, const Point& y) const;
  Point exp_map(const Point& x, const TangentVec& v) const;
  TangentVec log_map(const Point& x, const Point& y) const;
  Point geodesic_point(const Point& x, const Point& y, double r) const;
  TangentVec parallel_transport(const Point& x, const Point& y, const TangentVec& v) const;
  Frame parallel_transport(const Point& x, const Point& y, const Frame& frame) const;
  /// Transport along the geodesic t -> exp_x(t v), t in [0, 1].
  TangentVec transport_along(const Point& x, const TangentVec& v, const TangentVec& w) const;

  TangentVec drift(const Point& x) const;

  /// Deterministic measurable section of the frame bundle.
  Frame canonical_frame(const Point& x) const;
  /// Origin, north pole (last axis) or hyperboloid apex.
  Point base_point() const;
  /// exp_x(d e) for the first canonical frame vector e at x.
  Point point_at_distance(const Point& x, double d) const;
  /// Point of the given embedding coordinates after validation.
  Point make_point(const Eigen::VectorXd& coords) const;

 private:
  ModelSpace(SpaceKind kind, int m, double param);
  TangentVec transport_unit(const Point& x, const TangentVec& u, double length,
                            const TangentVec& v) const;

  SpaceKind kind_;
  int m_;
  double rho_ = 1.0;     // sphere radius / hyperboloid scale R
  double lambda_ = 0.0;  // OU rate
};

double frame_orthonormality_error(const ModelSpace& space, const Frame& frame);

}  // namespace ctl
