#include "ctl/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ctl {

namespace {

constexpr double kValidateTol = 1e-8;
constexpr double kAntipodalTol = 1e-12;

bool is_flat(SpaceKind k) { return k == SpaceKind::Euclidean || k == SpaceKind::EuclideanOU; }

}  // namespace

ModelSpace::ModelSpace(SpaceKind kind, int m, double param) : kind_(kind), m_(m) {
  if (m < 1) throw GeometryError("ModelSpace: dimension must be >= 1");
  switch (kind) {
    case SpaceKind::Sphere:
      if (!(param > 0.0)) throw GeometryError("sphere radius must be positive");
      rho_ = param;
      break;
    case SpaceKind::Hyperbolic:
      if (!(param < 0.0)) throw GeometryError("hyperbolic curvature must be negative");
      rho_ = 1.0 / std::sqrt(-param);
      break;
    case SpaceKind::EuclideanOU:
      if (!(param > 0.0)) throw GeometryError("OU rate must be positive");
      lambda_ = param;
      break;
    case SpaceKind::Euclidean:
      break;
  }
}

ModelSpace ModelSpace::euclidean(int m) { return {SpaceKind::Euclidean, m, 0.0}; }
ModelSpace ModelSpace::sphere(int m, double radius) { return {SpaceKind::Sphere, m, radius}; }
ModelSpace ModelSpace::hyperbolic(int m, double curvature) {
  return {SpaceKind::Hyperbolic, m, curvature};
}
ModelSpace ModelSpace::ornstein_uhlenbeck(int m, double lambda) {
  return {SpaceKind::EuclideanOU, m, lambda};
}

int ModelSpace::ambient_dim() const { return is_flat(kind_) ? m_ : m_ + 1; }

double ModelSpace::radius() const { return rho_; }

double ModelSpace::curvature() const {
  switch (kind_) {
    case SpaceKind::Sphere:
      return 1.0 / (rho_ * rho_);
    case SpaceKind::Hyperbolic:
      return -1.0 / (rho_ * rho_);
    default:
      return 0.0;
  }
}

std::string ModelSpace::name() const {
  switch (kind_) {
    case SpaceKind::Euclidean:
      return "euclidean" + std::to_string(m_);
    case SpaceKind::Sphere:
      return "sphere" + std::to_string(m_);
    case SpaceKind::Hyperbolic:
      return "hyperbolic" + std::to_string(m_);
    case SpaceKind::EuclideanOU:
      return "ou" + std::to_string(m_);
  }
  return "unknown";
}

CurvatureDimension ModelSpace::curvature_dimension() const {
  if (kind_ == SpaceKind::EuclideanOU) return {lambda_, kInfinity};
  return {curvature() * (m_ - 1), static_cast<double>(m_)};
}

CurvatureDimension ModelSpace::curvature_dimension(double N) const {
  if (kind_ == SpaceKind::EuclideanOU && N < kInfinity) {
    throw UnsupportedParameter(
        "OU drift is unbounded, so the curvature-dimension bound only holds with N = inf");
  }
  if (N < m_) throw UnsupportedParameter("N must be at least the manifold dimension");
  auto cd = curvature_dimension();
  cd.N = N;
  return cd;
}

double ModelSpace::diameter() const {
  return kind_ == SpaceKind::Sphere ? std::numbers::pi * rho_ : kInfinity;
}

bool ModelSpace::satisfies_diameter_condition(const CurvatureDimension& cd) const {
  if (cd.K <= 0.0) return true;
  if (!cd.finite_dimension()) return true;
  return diameter() < std::numbers::pi * std::sqrt((cd.N - 1.0) / cd.K);
}

CurvatureDimension ModelSpace::diameter_fallback(const CurvatureDimension& cd,
                                                 double factor) const {
  if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("fallback factor must lie in (0, 1)");
  CurvatureDimension out = cd;
  for (int i = 0; i < 200 && !satisfies_diameter_condition(out); ++i) out.K *= factor;
  if (out.K == cd.K) out.K *= factor;
  if (!satisfies_diameter_condition(out)) throw GeometryError("no admissible K' found");
  return out;
}

double ModelSpace::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  if (kind_ == SpaceKind::Hyperbolic) return u.tail(m_).dot(v.tail(m_)) - u(0) * v(0);
  return u.dot(v);
}

double ModelSpace::norm(const TangentVec& v) const {
  return std::sqrt(std::max(0.0, inner(v.coords, v.coords)));
}

void ModelSpace::validate(const Point& x) const {
  if (x.coords.size() != ambient_dim()) throw GeometryError("point has the wrong ambient dimension");
  if (!x.coords.allFinite()) throw GeometryError("point has non-finite coordinates");
  if (kind_ == SpaceKind::Sphere) {
    if (std::abs(x.coords.norm() - rho_) > kValidateTol * rho_) {
      throw GeometryError("point is not on the sphere");
    }
  } else if (kind_ == SpaceKind::Hyperbolic) {
    const double q = inner(x.coords, x.coords);
    if (std::abs(q + rho_ * rho_) > kValidateTol * std::max(1.0, x.coords.squaredNorm()) ||
        x.coords(0) <= 0.0) {
      throw GeometryError("point is not on the upper hyperboloid sheet");
    }
  }
}

void ModelSpace::validate_tangent(const Point& x, const TangentVec& v) const {
  if (v.coords.size() != ambient_dim()) throw GeometryError("tangent vector has the wrong dimension");
  if (is_flat(kind_)) return;
  const double scale = std::max(1.0, v.coords.norm() * x.coords.norm());
  if (std::abs(inner(x.coords, v.coords)) > kValidateTol * scale) {
    throw GeometryError("vector is not tangent at the base point");
  }
}

Point ModelSpace::project(const Point& x) const {
  switch (kind_) {
    case SpaceKind::Sphere:
      return {x.coords * (rho_ / x.coords.norm())};
    case SpaceKind::Hyperbolic: {
      Point y = x;
      y.coords(0) = std::sqrt(rho_ * rho_ + x.coords.tail(m_).squaredNorm());
      return y;
    }
    default:
      return x;
  }
}

TangentVec ModelSpace::project_tangent(const Point& x, const Eigen::VectorXd& v) const {
  switch (kind_) {
    case SpaceKind::Sphere:
      return {v - (x.coords.dot(v) / (rho_ * rho_)) * x.coords};
    case SpaceKind::Hyperbolic:
      return {v + (inner(x.coords, v) / (rho_ * rho_)) * x.coords};
    default:
      return {v};
  }
}

Point ModelSpace::make_point(const Eigen::VectorXd& coords) const {
  Point x{coords};
  validate(x);
  return project(x);
}

Geodesic ModelSpace::geodesic(const Point& x, const Point& y) const {
  Geodesic g;
  const Eigen::VectorXd delta = y.coords - x.coords;
  if (is_flat(kind_)) {
    g.length = delta.norm();
    g.direction.coords = g.length > 0.0 ? Eigen::VectorXd(delta / g.length)
                                        : Eigen::VectorXd::Zero(ambient_dim());
    return g;
  }
  // Tangential part of y - x at x; its length is rho sin(alpha) or R sinh(alpha).
  const TangentVec u = project_tangent(x, delta);
  const double un = norm(u);
  if (kind_ == SpaceKind::Sphere) {
    const double cosa = x.coords.dot(y.coords) / (rho_ * rho_);
    const double alpha = std::atan2(un / rho_, cosa);
    g.length = rho_ * alpha;
    if (un > kAntipodalTol * rho_) {
      g.direction.coords = u.coords / un;
    } else if (cosa < 0.0) {
      // Antipodal pair: pick the coordinate axis with the largest component
      // orthogonal to x, lowest index on ties.
      int best = 0;
      double best_norm = -1.0;
      for (int i = 0; i < ambient_dim(); ++i) {
        const double n2 = 1.0 - (x.coords(i) * x.coords(i)) / (rho_ * rho_);
        if (n2 > best_norm + 1e-15) {
          best_norm = n2;
          best = i;
        }
      }
      const TangentVec e = project_tangent(x, Eigen::VectorXd::Unit(ambient_dim(), best));
      g.direction.coords = e.coords / norm(e);
      g.length = std::numbers::pi * rho_;
      g.tie_broken = true;
    } else {
      g.direction.coords = Eigen::VectorXd::Zero(ambient_dim());
      g.length = 0.0;
    }
    return g;
  }
  // Hyperboloid.
  g.length = rho_ * std::asinh(un / rho_);
  g.direction.coords = un > 0.0 ? Eigen::VectorXd(u.coords / un) : Eigen::VectorXd::Zero(ambient_dim());
  return g;
}

double ModelSpace::distance(const Point& x, const Point& y) const {
  validate(x);
  validate(y);
  return geodesic(x, y).length;
}

Point ModelSpace::exp_map(const Point& x, const TangentVec& v) const {
  if (is_flat(kind_)) return {x.coords + v.coords};
  const double vn = norm(v);
  if (vn == 0.0) return x;
  const double a = vn / rho_;
  Eigen::VectorXd y;
  if (kind_ == SpaceKind::Sphere) {
    y = std::cos(a) * x.coords + (rho_ * std::sin(a) / vn) * v.coords;
  } else {
    y = std::cosh(a) * x.coords + (rho_ * std::sinh(a) / vn) * v.coords;
  }
  return project(Point{y});
}

TangentVec ModelSpace::log_map(const Point& x, const Point& y) const {
  const Geodesic g = geodesic(x, y);
  return {g.direction.coords * g.length};
}

Point ModelSpace::geodesic_point(const Point& x, const Point& y, double r) const {
  const Geodesic g = geodesic(x, y);
  return exp_map(x, TangentVec{g.direction.coords * (r * g.length)});
}

TangentVec ModelSpace::transport_unit(const Point& x, const TangentVec& u, double length,
                                      const TangentVec& v) const {
  if (is_flat(kind_) || length == 0.0) return v;
  const double a = length / rho_;
  const double vu = inner(v.coords, u.coords);
  Eigen::VectorXd end_dir;
  if (kind_ == SpaceKind::Sphere) {
    end_dir = std::cos(a) * u.coords - (std::sin(a) / rho_) * x.coords;
  } else {
    end_dir = std::cosh(a) * u.coords + (std::sinh(a) / rho_) * x.coords;
  }
  return {v.coords - vu * u.coords + vu * end_dir};
}

TangentVec ModelSpace::parallel_transport(const Point& x, const Point& y,
                                          const TangentVec& v) const {
  const Geodesic g = geodesic(x, y);
  TangentVec out = transport_unit(x, g.direction, g.length, v);
  return is_flat(kind_) ? out : project_tangent(y, out.coords);
}

Frame ModelSpace::parallel_transport(const Point& x, const Point& y, const Frame& frame) const {
  const Geodesic g = geodesic(x, y);
  Frame out{y, Eigen::MatrixXd(frame.vectors.rows(), frame.vectors.cols())};
  for (int j = 0; j < frame.vectors.cols(); ++j) {
    TangentVec v = transport_unit(x, g.direction, g.length, TangentVec{frame.vectors.col(j)});
    out.vectors.col(j) = is_flat(kind_) ? v.coords : project_tangent(y, v.coords).coords;
  }
  return out;
}

TangentVec ModelSpace::transport_along(const Point& x, const TangentVec& v,
                                       const TangentVec& w) const {
  if (is_flat(kind_)) return w;
  const double vn = norm(v);
  if (vn == 0.0) return w;
  const Point y = exp_map(x, v);
  TangentVec out = transport_unit(x, TangentVec{v.coords / vn}, vn, w);
  return project_tangent(y, out.coords);
}

TangentVec ModelSpace::drift(const Point& x) const {
  if (kind_ == SpaceKind::EuclideanOU) return {-lambda_ * x.coords};
  return {Eigen::VectorXd::Zero(ambient_dim())};
}

Frame ModelSpace::canonical_frame(const Point& x) const {
  Frame f{x, Eigen::MatrixXd::Zero(ambient_dim(), m_)};
  if (is_flat(kind_)) {
    f.vectors = Eigen::MatrixXd::Identity(m_, m_);
    return f;
  }
  std::vector<int> axes;
  if (kind_ == SpaceKind::Sphere) {
    int drop = 0;
    for (int i = 1; i < ambient_dim(); ++i) {
      if (std::abs(x.coords(i)) > std::abs(x.coords(drop))) drop = i;
    }
    for (int i = 0; i < ambient_dim(); ++i) {
      if (i != drop) axes.push_back(i);
    }
  } else {
    for (int i = 1; i < ambient_dim(); ++i) axes.push_back(i);
  }
  int col = 0;
  for (int axis : axes) {
    Eigen::VectorXd v = project_tangent(x, Eigen::VectorXd::Unit(ambient_dim(), axis)).coords;
    for (int j = 0; j < col; ++j) v -= inner(v, f.vectors.col(j)) * f.vectors.col(j);
    // Second Gram-Schmidt pass for orthogonality to rounding.
    for (int j = 0; j < col; ++j) v -= inner(v, f.vectors.col(j)) * f.vectors.col(j);
    f.vectors.col(col++) = v / std::sqrt(inner(v, v));
  }
  return f;
}

Point ModelSpace::base_point() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ambient_dim());
  if (kind_ == SpaceKind::Sphere) c(ambient_dim() - 1) = rho_;
  if (kind_ == SpaceKind::Hyperbolic) c(0) = rho_;
  return {c};
}

Point ModelSpace::point_at_distance(const Point& x, double d) const {
  const Frame f = canonical_frame(x);
  return exp_map(x, TangentVec{f.vectors.col(0) * d});
}

double frame_orthonormality_error(const ModelSpace& space, const Frame& frame) {
  double worst = 0.0;
  for (int i = 0; i < frame.vectors.cols(); ++i) {
    for (int j = 0; j < frame.vectors.cols(); ++j) {
      const double g = space.inner(frame.vectors.col(i), frame.vectors.col(j));
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace ctl
