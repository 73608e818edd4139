#include "ctl/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ctl {

namespace {

constexpr double kTaylorSwitch = 1e-8;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_comp_domain(double kappa, double u) {
  require(std::isfinite(kappa) && std::isfinite(u), "comparison function: non-finite argument");
  require(u >= 0.0, "comparison function: u must be nonnegative");
  if (kappa > 0.0) {
    require(u <= std::numbers::pi / std::sqrt(kappa) * (1.0 + 1e-15),
            "comparison function: u exceeds pi/sqrt(kappa)");
  }
}

// Unchecked evaluations shared by the public entry points.
double raw_s(double kappa, double u) {
  const double ku2 = kappa * u * u;
  if (std::abs(ku2) < kTaylorSwitch) {
    return u * (1.0 - ku2 / 6.0 * (1.0 - ku2 / 20.0 * (1.0 - ku2 / 42.0)));
  }
  if (kappa > 0.0) {
    const double r = std::sqrt(kappa);
    return std::sin(r * u) / r;
  }
  const double r = std::sqrt(-kappa);
  return std::sinh(r * u) / r;
}

double raw_c(double kappa, double u) {
  const double ku2 = kappa * u * u;
  if (std::abs(ku2) < kTaylorSwitch) {
    return 1.0 - ku2 / 2.0 * (1.0 - ku2 / 12.0 * (1.0 - ku2 / 30.0));
  }
  if (kappa > 0.0) return std::cos(std::sqrt(kappa) * u);
  return std::cosh(std::sqrt(-kappa) * u);
}

}  // namespace

CurvatureDimension::CurvatureDimension(double k, double n) : K(k), N(n) {
  require(std::isfinite(k), "CurvatureDimension: K must be finite");
  require(n > 0.0, "CurvatureDimension: N must be positive");
}

double CurvatureDimension::kstar() const {
  require(N > 1.0, "CurvatureDimension: K/(N-1) needs N > 1");
  if (!finite_dimension()) return 0.0;
  return K / (N - 1.0);
}

ExponentPair ExponentPair::from(double p, double beta) {
  require(p > 1.0 && std::isfinite(p), "ExponentPair: p must lie in (1, inf)");
  require(beta > 1.0 && std::isfinite(beta), "ExponentPair: beta must lie in (1, inf)");
  require(beta <= p, "ExponentPair: beta must not exceed p");
  ExponentPair e;
  e.p = p;
  e.p_star = p / (p - 1.0);
  e.beta = beta;
  e.beta_star = beta / (beta - 1.0);
  return e;
}

double comp_s(double kappa, double u) {
  check_comp_domain(kappa, u);
  return raw_s(kappa, u);
}

double comp_c(double kappa, double u) {
  check_comp_domain(kappa, u);
  return raw_c(kappa, u);
}

double comp_t(double kappa, double u) {
  check_comp_domain(kappa, u);
  const double c = raw_c(kappa, u);
  require(std::abs(c) > 1e-14, "comp_t: c_kappa(u) vanishes");
  return raw_s(kappa, u) / c;
}

double comp_c_inverse(double kappa, double y) {
  require(kappa != 0.0, "comp_c_inverse: c_0 is constant");
  if (kappa > 0.0) {
    require(y >= -1.0 && y <= 1.0, "comp_c_inverse: argument outside [-1, 1]");
    return std::acos(y) / std::sqrt(kappa);
  }
  require(y >= 1.0, "comp_c_inverse: argument below 1 for kappa < 0");
  return std::acosh(y) / std::sqrt(-kappa);
}

double comp_half_angle(double kappa, double u) {
  check_comp_domain(kappa, u);
  const double h = 0.5 * u;
  return kappa * raw_s(kappa, h) / raw_c(kappa, h);
}

double AdditionResiduals::max_abs() const {
  return std::max({std::abs(cos_sum), std::abs(sin_sum), std::abs(pythagoras),
                   std::abs(sin_double), std::abs(cos_double)});
}

AdditionResiduals addition_identities_check(double kappa, double u, double v) {
  const double su = comp_s(kappa, u);
  const double cu = comp_c(kappa, u);
  const double sv = comp_s(kappa, v);
  const double cv = comp_c(kappa, v);
  AdditionResiduals r;
  r.cos_sum = comp_c(kappa, u + v) - (cu * cv - kappa * su * sv);
  r.sin_sum = comp_s(kappa, u + v) - (su * cv + cu * sv);
  r.pythagoras = cu * cu + kappa * su * su - 1.0;
  r.sin_double = comp_s(kappa, 2.0 * u) - 2.0 * su * cu;
  r.cos_double = comp_c(kappa, 2.0 * u) - (cu * cu - kappa * su * su);
  return r;
}

double arccos_exp_neg(double x) {
  require(x >= 0.0, "arccos_exp_neg: x must be nonnegative");
  return std::atan2(std::sqrt(-std::expm1(-2.0 * x)), std::exp(-x));
}

double arccosh_exp(double x) {
  require(x >= 0.0, "arccosh_exp: x must be nonnegative");
  return x + std::log1p(std::sqrt(-std::expm1(-2.0 * x)));
}

namespace {

void check_interval(double s, double t) {
  require(std::isfinite(s) && std::isfinite(t), "time interval: non-finite endpoint");
  require(s >= 0.0, "time interval: s must be nonnegative");
  require(s <= t, "time interval: s must not exceed t");
}

}  // namespace

double j_measure(const CurvatureDimension& cd, double s, double t) {
  check_interval(s, t);
  require(cd.finite_dimension(), "j_measure: N must be finite");
  const double K = cd.K;
  const double N = cd.N;
  if (s == t) return 0.0;
  if (K == 0.0) return std::sqrt(2.0 * N) * (std::sqrt(t) - std::sqrt(s));
  if (K > 0.0) return std::sqrt(N / K) * (arccos_exp_neg(K * t) - arccos_exp_neg(K * s));
  const double a = -K;
  return std::sqrt(N / a) * (arccosh_exp(a * t) - arccosh_exp(a * s));
}

double weighted_j_measure(const CurvatureDimension& cd, double s, double t) {
  check_interval(s, t);
  require(cd.finite_dimension(), "weighted_j_measure: N must be finite");
  const double K = cd.K;
  const double N = cd.N;
  if (s == t) return 0.0;
  if (K == 0.0) return std::sqrt(2.0 * N) * (std::sqrt(t) - std::sqrt(s));
  // Substituting u = e^{Kr} turns e^{Kr} J(dr) into sqrt(N/K) du / sqrt(u^2 - 1).
  if (K > 0.0) return std::sqrt(N / K) * (arccosh_exp(K * t) - arccosh_exp(K * s));
  const double a = -K;
  return std::sqrt(N / a) * (arccos_exp_neg(a * t) - arccos_exp_neg(a * s));
}

double coeff_A(const CurvatureDimension& cd, double s, double t) {
  check_interval(s, t);
  require(s < t, "coeff_A: requires s < t");
  return j_measure(cd, s, t) / weighted_j_measure(cd, s, t);
}

namespace {

double kstar_checked(const CurvatureDimension& cd) {
  require(cd.finite_dimension() && cd.N > 1.0, "psi: requires 1 < N < inf");
  return cd.K / (cd.N - 1.0);
}

void check_taus(double tau1, double tau2) {
  require(tau1 > 0.0 && tau2 > 0.0, "time scales must be positive");
}

}  // namespace

double psi(double tau1, double tau2, const CurvatureDimension& cd, double r) {
  check_taus(tau1, tau2);
  require(r > 0.0, "psi: defined on (0, inf)");
  const double ks = kstar_checked(cd);
  const double s = comp_s(ks, r);
  require(s > 0.0, "psi: r outside the domain of t_{K*}");
  const double c = raw_c(ks, r);
  // (tau1 + tau2) c - 2 sqrt(tau1 tau2) regrouped so that c - 1 is never formed.
  const double sq = std::sqrt(tau1 * tau2);
  const double gap = std::sqrt(tau2) - std::sqrt(tau1);
  const double num = gap * gap * c - 2.0 * sq * comp_half_angle(ks, r) * s;
  return (cd.N - 1.0) * num / s;
}

double psi_upper_bound(double tau1, double tau2, const CurvatureDimension& cd, double r) {
  check_taus(tau1, tau2);
  require(r > 0.0, "psi_upper_bound: defined on (0, inf)");
  const double ks = kstar_checked(cd);
  if (ks > 0.0) require(r < std::numbers::pi / std::sqrt(ks), "psi_upper_bound: r out of domain");
  const double gap = std::sqrt(tau2) - std::sqrt(tau1);
  const double tail = (cd.N - 1.0) * gap * gap / r;
  if (cd.K >= 0.0) return -std::sqrt(tau1 * tau2) * cd.K * r + tail;
  return -0.5 * (tau1 + tau2) * cd.K * r + tail;
}

double tau_star(double tau1, double tau2, double K) {
  check_taus(tau1, tau2);
  return K >= 0.0 ? std::sqrt(tau1 * tau2) : 0.5 * (tau1 + tau2);
}

double theta_exponent(double tau1, double tau2, const CurvatureDimension& cd, double p) {
  check_taus(tau1, tau2);
  const double gap = std::sqrt(tau2) - std::sqrt(tau1);
  return cd.K * (tau1 + tau2) + p * cd.kstar() * gap * gap / 2.0;
}

double phi_weight(double d, double tau1, double tau2, double kstar, double u) {
  check_taus(tau1, tau2);
  require(d > 0.0, "phi_weight: d must be positive");
  require(u >= 0.0 && u <= d, "phi_weight: u outside [0, d]");
  const double sd = comp_s(kstar, d);
  require(sd > 0.0, "phi_weight: s_{K*}(d) vanishes");
  return (std::sqrt(tau2) * comp_s(kstar, u) + std::sqrt(tau1) * comp_s(kstar, d - u)) / sd;
}

double one_minus_exp_over(double x) {
  if (std::abs(x) < 1e-12) return 1.0 - 0.5 * x;
  return -std::expm1(-x) / x;
}

double contraction_gap(double K, double t) {
  return 2.0 * t * one_minus_exp_over(2.0 * K * t);
}

}  // namespace ctl
