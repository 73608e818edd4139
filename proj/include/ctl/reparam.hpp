#pragma once

#include <optional>

#include "ctl/comparison.hpp"
#include "ctl/quadrature.hpp"

namespace ctl {

/// Coefficient pair (a, b) of a space-time Wasserstein control together with
/// the measure J(dx) = b(x)^{-1} dx. The Bakry-Ledoux instance keeps its
/// (K, N) so that interval masses use closed forms.
struct CoefficientFamily {
  RealFn a;
  RealFn b;
  std::optional<CurvatureDimension> bakry_ledoux;

  /// a(t) = e^{-Kt}, b(t) = sqrt((e^{2Kt} - 1)/(NK)) (sqrt(2t/N) at K = 0).
  static CoefficientFamily BakryLedoux(const CurvatureDimension& cd);
  /// User-supplied continuous, strictly positive a and b.
  static CoefficientFamily Sampled(RealFn a, RealFn b);

  /// J([s, t]).
  double j(double s, double t) const;
  /// Integral of J(dr)/a(r) over [s, t].
  double j_over_a(double s, double t) const;
  /// (J([s,t])^{-1} int_s^t J(dr)/a(r))^{-1}, the distance prefactor.
  double contraction(double s, double t) const;
  /// J([0, 1]) is finite (evaluated by quadrature).
  bool locally_finite() const;
};

/// A pair of C^1 increasing surjections xi: [0,1] -> [s,t], eta: [0,1] -> [0,1].
/// Derivatives are taken numerically unless analytic ones are supplied.
struct TimeReparam {
  double s = 0.0;
  double t = 0.0;
  RealFn xi;
  RealFn eta;
  RealFn xi_prime_analytic;   // optional
  RealFn eta_prime_analytic;  // optional

  double xi_prime(double r) const;
  double eta_prime(double r) const;

  /// Endpoint and positive-derivative checks on an `n`-point grid.
  bool is_admissible(int n = 64, double tol = 1e-10) const;
};

/// Derivative on [0, 1] that stays inside the interval: central Richardson in
/// the interior, fourth-order one-sided near the endpoints.
double unit_interval_derivative(const RealFn& f, double r, double h = 1e-3);

/// The (xi, eta) that make xi'/b(xi) and a(xi) eta' constant on [0, 1].
TimeReparam duality_reparam(const CoefficientFamily& family, double s, double t);

struct ConstancyResiduals {
  double speed = 0.0;        // max |xi'/b(xi) - J([s,t])|
  double contraction = 0.0;  // max |a(xi) eta' - prefactor|
};

/// Residuals of the two constancy properties on midpoints of an n-cell grid.
ConstancyResiduals duality_constancy(const CoefficientFamily& family, const TimeReparam& reparam,
                                     int n = 64);

/// Functions l, theta_h and xi_h = l^{-1} o theta_h used to differentiate the
/// comparison-function Wasserstein control along t -> (t/lambda, lambda t).
struct SwcReparam {
  CurvatureDimension cd;
  double w = 0.0;
  double lambda = 1.0;
  double h = 0.0;
  RealFn l;
  RealFn l_inverse;
  RealFn theta_h;
  RealFn xi_h;

  /// (xi_h, eta = identity) as a TimeReparam on [h/lambda, lambda h].
  TimeReparam as_time_reparam() const;
};

SwcReparam swc_reparam(double w, double lambda, double h, const CurvatureDimension& cd);

/// max_r |theta_h'' + (K w^2 / 2N) s_{K/N}(2 theta_h)| on an interior grid.
double swc_theta_ode_residual(const SwcReparam& rep, int n = 64);

/// int_0^1 ( a(xi)^beta W^beta eta'^beta + (xi'/b(xi))^beta ) dr by composite Simpson.
double wc_var_rhs(const CoefficientFamily& family, const TimeReparam& reparam, double W,
                  const ExponentPair& exponents, int quadrature_n = 256);

}  // namespace ctl
