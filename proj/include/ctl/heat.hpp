#pragma once

#include <memory>
#include <vector>

#include "ctl/quadrature.hpp"
#include "ctl/test_functions.hpp"
#include "ctl/transport.hpp"
#include "ctl/walk.hpp"

namespace ctl {

enum class BackendKind { MonteCarlo, EuclideanGaussian, CircleFourier, SphereZonal, OUMehler };

struct HeatBackend {
  BackendKind kind = BackendKind::EuclideanGaussian;
  WalkConfig walk;        // MonteCarlo only
  int n_modes = 64;       // CircleFourier / SphereZonal
  int quadrature_nodes = 0;  // 0: dimension-dependent default

  static HeatBackend monte_carlo(const WalkConfig& cfg);
  static HeatBackend euclidean_gaussian(int nodes = 0);
  static HeatBackend circle_fourier(int n_modes = 64);
  static HeatBackend sphere_zonal(int n_modes = 64);
  static HeatBackend ou_mehler(int nodes = 0);
  /// The deterministic backend matching the space, if there is one.
  static HeatBackend deterministic_for(const ModelSpace& space);

  bool deterministic() const { return kind != BackendKind::MonteCarlo; }
};

struct HeatValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// P_t f for one f on one space. Spectral coefficients and quadrature rules
/// are computed once at construction.
class HeatSemigroup {
 public:
  HeatSemigroup(const ModelSpace& space, const HeatBackend& backend, PointFn f);

  HeatValue apply(double t, const Point& x) const;
  /// max over 2m+2 tangent directions of the central geodesic difference quotient.
  HeatValue grad(double t, const Point& x, double h = 1e-3) const;
  /// (P_{t+dt} f - P_{t-dt} f)/(2 dt).
  HeatValue generator(double t, const Point& x, double dt = 1e-4) const;

  const ModelSpace& space() const { return space_; }
  const HeatBackend& backend() const { return backend_; }

 private:
  double deterministic_value(double t, const Point& x) const;
  std::vector<double> mc_values(double t, const Point& x) const;
  std::vector<TangentVec> directions(const Point& x, double t, double h) const;

  ModelSpace space_;
  HeatBackend backend_;
  PointFn f_;
  QuadratureRule gauss_;                 // Gauss-Hermite per axis
  std::vector<double> legendre_coeffs_;  // SphereZonal
  std::vector<double> cos_coeffs_;       // CircleFourier
  std::vector<double> sin_coeffs_;
};

HeatValue heat_apply(const ModelSpace& space, const HeatBackend& backend, const PointFn& f,
                     double t, const Point& x);
HeatValue grad_heat(const ModelSpace& space, const HeatBackend& backend, const PointFn& f, double t,
                    const Point& x, double h = 1e-3);
HeatValue generator_heat(const ModelSpace& space, const HeatBackend& backend, const PointFn& f,
                         double t, const Point& x, double dt = 1e-4);

/// n terminal points of independent walks run for time t from x, uniformly weighted.
EmpiricalMeasure heat_sample(const ModelSpace& space, double t, const Point& x, int n,
                             const WalkConfig& cfg, int jobs = 1);

/// P_t((g + delta)^r)^{1/r} - delta - P_t(g^r)^{1/r} for g >= 0, r in (0, 1), delta > 0.
double mono_app_margin(const ModelSpace& space, const HeatBackend& backend, const PointFn& g,
                       double r, double delta, double t, const Point& x);

/// P_l(u) for l = 0..n-1.
std::vector<double> legendre_values(int n, double u);

}  // namespace ctl
