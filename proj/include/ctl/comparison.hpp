#pragma once

#include <functional>
#include <limits>
#include <optional>

namespace ctl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lower Ricci bound K and upper dimension bound N of a curvature-dimension
/// condition. N may be +infinity.
struct CurvatureDimension {
  double K = 0.0;
  double N = kInfinity;

  CurvatureDimension() = default;
  CurvatureDimension(double k, double n);

  bool finite_dimension() const { return N < kInfinity; }
  /// K/N, zero when N is infinite.
  double kappa() const { return finite_dimension() ? K / N : 0.0; }
  /// K/(N-1); requires N > 1.
  double kstar() const;
};

/// Exponents p, p_*, beta, beta_* with 1/p + 1/p_* = 1, 1/beta + 1/beta_* = 1
/// and beta <= p.
struct ExponentPair {
  double p = 2.0;
  double p_star = 2.0;
  double beta = 2.0;
  double beta_star = 2.0;

  static ExponentPair from(double p, double beta);
};

/// Generalized sine s_kappa(u): sin(sqrt(kappa) u)/sqrt(kappa), sinh branch for
/// kappa < 0, u at kappa = 0. Domain: u >= 0 and u <= pi/sqrt(kappa) if kappa > 0.
double comp_s(double kappa, double u);
/// Generalized cosine c_kappa(u).
double comp_c(double kappa, double u);
/// s_kappa / c_kappa; also rejects c_kappa(u) == 0.
double comp_t(double kappa, double u);
/// Inverse of c_kappa on its monotone branch: kappa > 0 needs y in [-1, 1],
/// kappa < 0 needs y >= 1. kappa = 0 has no inverse.
double comp_c_inverse(double kappa, double y);
/// kappa * t_kappa(u/2) = (1 - c_kappa(u)) / s_kappa(u), evaluated without
/// cancellation near u = 0.
double comp_half_angle(double kappa, double u);

struct AdditionResiduals {
  double cos_sum = 0.0;      // c(u+v) - (c c - kappa s s)
  double sin_sum = 0.0;      // s(u+v) - (s c + c s)
  double pythagoras = 0.0;   // c^2 + kappa s^2 - 1 at u
  double sin_double = 0.0;   // s(2u) - 2 s c
  double cos_double = 0.0;   // c(2u) - (c^2 - kappa s^2)

  double max_abs() const;
};

AdditionResiduals addition_identities_check(double kappa, double u, double v);

/// Mass J_N([s, t]) of the measure sqrt(NK/(e^{2Kr}-1)) dr. Requires finite N.
double j_measure(const CurvatureDimension& cd, double s, double t);
/// Integral of e^{Kr} J_N(dr) over [s, t].
double weighted_j_measure(const CurvatureDimension& cd, double s, double t);
/// Distance-contraction coefficient (J^{-1} int_s^t e^{Kr} J(dr))^{-1}.
double coeff_A(const CurvatureDimension& cd, double s, double t);

/// Upper bound for the index form along a geodesic of length r.
double psi(double tau1, double tau2, const CurvatureDimension& cd, double r);
/// Two-branch closed-form bound dominating psi.
double psi_upper_bound(double tau1, double tau2, const CurvatureDimension& cd, double r);

double tau_star(double tau1, double tau2, double K);
/// K(tau1 + tau2) + p K^* (sqrt(tau2) - sqrt(tau1))^2 / 2.
double theta_exponent(double tau1, double tau2, const CurvatureDimension& cd, double p);

/// Index-lemma weight interpolating sqrt(tau1) at u = 0 and sqrt(tau2) at u = d.
double phi_weight(double d, double tau1, double tau2, double kstar, double u);

/// acos(e^{-x}) for x >= 0 without cancellation near x = 0.
double arccos_exp_neg(double x);
/// acosh(e^{x}) for x >= 0 without cancellation near x = 0.
double arccosh_exp(double x);

/// (1 - e^{-x}) / x with the x -> 0 limit 1.
double one_minus_exp_over(double x);
/// (1 - e^{-2Kt}) / K with the K -> 0 limit 2t.
double contraction_gap(double K, double t);

}  // namespace ctl
