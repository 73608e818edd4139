#pragma once

#include <functional>
#include <string>

#include "ctl/manifold.hpp"

namespace ctl {

using PointFn = std::function<double(const Point&)>;

/// Smooth function on a model space with its analytic gradient norm.
struct TestFunction {
  std::string name;
  PointFn f;
  PointFn grad_norm;
  bool zonal = false;  // depends only on the polar angle from the last axis
};

/// Polar angle from the last coordinate axis on the sphere.
double polar_angle(const ModelSpace& space, const Point& x);
/// Angle atan2(x_1, x_0) on the circle.
double circle_angle(const Point& x);
/// Point of the 2-sphere (or circle) at polar angle theta, azimuth phi.
Point sphere_point(const ModelSpace& space, double theta, double phi = 0.0);

TestFunction constant_function(double c);
/// cos(theta) on the sphere; on the circle this is cos(phi).
TestFunction zonal_cosine(const ModelSpace& space);
/// sin(k phi) on the circle.
TestFunction circle_sine(const ModelSpace& space, int k = 1);
/// z_i on flat spaces.
TestFunction coordinate(const ModelSpace& space, int i = 0);
/// z_i^2 on flat spaces.
TestFunction coordinate_square(const ModelSpace& space, int i = 0);
/// sin(z_i) on flat spaces.
TestFunction coordinate_sine(const ModelSpace& space, int i = 0);

/// Lookup by config name: constant, cos, sin, coordinate, square, sine.
TestFunction test_function_by_name(const ModelSpace& space, const std::string& name);

}  // namespace ctl
