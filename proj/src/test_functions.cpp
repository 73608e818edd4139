#include "ctl/test_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace ctl {

namespace {

void require_flat(const ModelSpace& space, int i, const char* what) {
  if (space.kind() != SpaceKind::Euclidean && space.kind() != SpaceKind::EuclideanOU) {
    throw std::invalid_argument(std::string(what) + ": needs a flat space");
  }
  if (i < 0 || i >= space.dim()) throw std::invalid_argument(std::string(what) + ": bad coordinate");
}

void require_circle(const ModelSpace& space, const char* what) {
  if (space.kind() != SpaceKind::Sphere || space.dim() != 1) {
    throw std::invalid_argument(std::string(what) + ": needs the circle");
  }
}

}  // namespace

double polar_angle(const ModelSpace& space, const Point& x) {
  const int last = space.ambient_dim() - 1;
  return std::atan2(x.coords.head(last).norm(), x.coords(last));
}

double circle_angle(const Point& x) { return std::atan2(x.coords(1), x.coords(0)); }

Point sphere_point(const ModelSpace& space, double theta, double phi) {
  if (space.kind() != SpaceKind::Sphere) throw std::invalid_argument("sphere_point: needs a sphere");
  const double r = space.radius();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(space.ambient_dim());
  if (space.dim() == 1) {
    c << r * std::cos(theta), r * std::sin(theta);
    return {c};
  }
  c(0) = r * std::sin(theta) * std::cos(phi);
  c(1) = r * std::sin(theta) * std::sin(phi);
  c(space.ambient_dim() - 1) = r * std::cos(theta);
  return {c};
}

TestFunction constant_function(double c) {
  return {"constant", [c](const Point&) { return c; }, [](const Point&) { return 0.0; }, true};
}

TestFunction zonal_cosine(const ModelSpace& space) {
  if (space.kind() != SpaceKind::Sphere) throw std::invalid_argument("zonal_cosine: needs a sphere");
  const double r = space.radius();
  if (space.dim() == 1) {
    return {"cos", [](const Point& x) { return std::cos(circle_angle(x)); },
            [r](const Point& x) { return std::abs(std::sin(circle_angle(x))) / r; }, false};
  }
  const int last = space.ambient_dim() - 1;
  return {"cos", [r, last](const Point& x) { return x.coords(last) / r; },
          [r, last](const Point& x) { return x.coords.head(last).norm() / (r * r); }, true};
}

TestFunction circle_sine(const ModelSpace& space, int k) {
  require_circle(space, "circle_sine");
  const double r = space.radius();
  return {"sin", [k](const Point& x) { return std::sin(k * circle_angle(x)); },
          [k, r](const Point& x) { return std::abs(k * std::cos(k * circle_angle(x))) / r; }, false};
}

TestFunction coordinate(const ModelSpace& space, int i) {
  require_flat(space, i, "coordinate");
  return {"coordinate", [i](const Point& x) { return x.coords(i); }, [](const Point&) { return 1.0; },
          false};
}

TestFunction coordinate_square(const ModelSpace& space, int i) {
  require_flat(space, i, "coordinate_square");
  return {"square", [i](const Point& x) { return x.coords(i) * x.coords(i); },
          [i](const Point& x) { return 2.0 * std::abs(x.coords(i)); }, false};
}

TestFunction coordinate_sine(const ModelSpace& space, int i) {
  require_flat(space, i, "coordinate_sine");
  return {"sine", [i](const Point& x) { return std::sin(x.coords(i)); },
          [i](const Point& x) { return std::abs(std::cos(x.coords(i))); }, false};
}

TestFunction test_function_by_name(const ModelSpace& space, const std::string& name) {
  if (name == "constant") return constant_function(1.0);
  if (name == "cos") return zonal_cosine(space);
  if (name == "sin") return circle_sine(space, 1);
  if (name == "coordinate") return coordinate(space, 0);
  if (name == "square") return coordinate_square(space, 0);
  if (name == "sine") return coordinate_sine(space, 0);
  throw std::invalid_argument("unknown test function: " + name);
}

}  // namespace ctl
