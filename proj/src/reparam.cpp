#include "ctl/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctl {

namespace {

constexpr double kFamilyQuadTol = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// int_s^t g(r) dr after r = u^2, which absorbs the 1/sqrt(r) singularity of
// J(dr) at the origin.
double integrate_sqrt_substituted(const RealFn& g, double s, double t) {
  const double lo = std::sqrt(s);
  const double hi = std::sqrt(t);
  const double floor_u = 1e-12 * std::max(hi, 1e-300);
  auto integrand = [&](double u) {
    const double uu = std::max(u, floor_u);
    return 2.0 * uu * g(uu * uu);
  };
  return adaptive_simpson(integrand, lo, hi, kFamilyQuadTol);
}

}  // namespace

CoefficientFamily CoefficientFamily::BakryLedoux(const CurvatureDimension& cd) {
  require(cd.finite_dimension(), "BakryLedoux family needs finite N");
  CoefficientFamily fam;
  const double K = cd.K;
  const double N = cd.N;
  fam.a = [K](double t) { return std::exp(-K * t); };
  fam.b = [K, N](double t) {
    const double x = 2.0 * K * t;
    const double ratio = std::abs(x) < 1e-12 ? 1.0 + 0.5 * x : std::expm1(x) / x;
    return std::sqrt(2.0 * t * ratio / N);
  };
  fam.bakry_ledoux = cd;
  return fam;
}

CoefficientFamily CoefficientFamily::Sampled(RealFn a, RealFn b) {
  CoefficientFamily fam;
  fam.a = std::move(a);
  fam.b = std::move(b);
  return fam;
}

double CoefficientFamily::j(double s, double t) const {
  require(s >= 0.0 && s <= t, "CoefficientFamily::j: need 0 <= s <= t");
  if (bakry_ledoux) return j_measure(*bakry_ledoux, s, t);
  if (s == t) return 0.0;
  return integrate_sqrt_substituted([this](double r) { return 1.0 / b(r); }, s, t);
}

double CoefficientFamily::j_over_a(double s, double t) const {
  require(s >= 0.0 && s <= t, "CoefficientFamily::j_over_a: need 0 <= s <= t");
  if (bakry_ledoux) return weighted_j_measure(*bakry_ledoux, s, t);
  if (s == t) return 0.0;
  return integrate_sqrt_substituted([this](double r) { return 1.0 / (a(r) * b(r)); }, s, t);
}

double CoefficientFamily::contraction(double s, double t) const {
  require(s < t, "CoefficientFamily::contraction: need s < t");
  return j(s, t) / j_over_a(s, t);
}

bool CoefficientFamily::locally_finite() const {
  try {
    return std::isfinite(j(0.0, 1.0));
  } catch (const std::runtime_error&) {
    return false;
  }
}

double unit_interval_derivative(const RealFn& f, double r, double h) {
  if (r - h >= 0.0 && r + h <= 1.0) return richardson_derivative(f, r, h);
  const double q = 0.25 * h;
  if (r + 4.0 * q <= 1.0 && r - h < 0.0) {
    return (-25.0 * f(r) + 48.0 * f(r + q) - 36.0 * f(r + 2 * q) + 16.0 * f(r + 3 * q) -
            3.0 * f(r + 4 * q)) /
           (12.0 * q);
  }
  return (25.0 * f(r) - 48.0 * f(r - q) + 36.0 * f(r - 2 * q) - 16.0 * f(r - 3 * q) +
          3.0 * f(r - 4 * q)) /
         (12.0 * q);
}

double TimeReparam::xi_prime(double r) const {
  if (xi_prime_analytic) return xi_prime_analytic(r);
  return unit_interval_derivative(xi, r);
}

double TimeReparam::eta_prime(double r) const {
  if (eta_prime_analytic) return eta_prime_analytic(r);
  return unit_interval_derivative(eta, r);
}

bool TimeReparam::is_admissible(int n, double tol) const {
  const double scale = std::max(1.0, std::abs(t));
  if (std::abs(xi(0.0) - s) > tol * scale || std::abs(xi(1.0) - t) > tol * scale) return false;
  if (std::abs(eta(0.0)) > tol || std::abs(eta(1.0) - 1.0) > tol) return false;
  for (int i = 0; i <= n; ++i) {
    const double r = static_cast<double>(i) / n;
    if (!(xi_prime(r) > 0.0) || !(eta_prime(r) > 0.0)) return false;
  }
  return true;
}

TimeReparam duality_reparam(const CoefficientFamily& family, double s, double t) {
  require(s >= 0.0 && s < t, "duality_reparam: need 0 <= s < t");
  if (!family.locally_finite()) throw std::runtime_error("duality_reparam: J is not locally finite");
  TimeReparam rep;
  rep.s = s;
  rep.t = t;
  const double total_j = family.j(s, t);
  const double total_ja = family.j_over_a(s, t);

  if (family.bakry_ledoux && family.bakry_ledoux->K == 0.0) {
    // J([s, x]) is proportional to sqrt(x) - sqrt(s): invert explicitly.
    const double rs = std::sqrt(s);
    const double rt = std::sqrt(t);
    rep.xi = [rs, rt](double r) {
      const double v = rs + r * (rt - rs);
      return v * v;
    };
  } else {
    rep.xi = [family, s, t, total_j](double r) {
      if (r <= 0.0) return s;
      if (r >= 1.0) return t;
      const double target = r * total_j;
      double lo = s;
      double hi = t;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (family.j(s, mid) < target) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };
  }
  auto xi = rep.xi;
  rep.eta = [family, xi, s, total_ja](double r) {
    if (r <= 0.0) return 0.0;
    if (r >= 1.0) return 1.0;
    return family.j_over_a(s, xi(r)) / total_ja;
  };
  return rep;
}

ConstancyResiduals duality_constancy(const CoefficientFamily& family, const TimeReparam& reparam,
                                     int n) {
  const double speed = family.j(reparam.s, reparam.t);
  const double prefactor = family.contraction(reparam.s, reparam.t);
  ConstancyResiduals res;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) / n;
    const double x = reparam.xi(r);
    res.speed = std::max(res.speed, std::abs(reparam.xi_prime(r) / family.b(x) - speed));
    res.contraction =
        std::max(res.contraction, std::abs(family.a(x) * reparam.eta_prime(r) - prefactor));
  }
  return res;
}

SwcReparam swc_reparam(double w, double lambda, double h, const CurvatureDimension& cd) {
  require(w >= 0.0, "swc_reparam: w must be nonnegative");
  require(lambda >= 1.0, "swc_reparam: lambda must be >= 1");
  require(h > 0.0, "swc_reparam: h must be positive");
  require(cd.finite_dimension(), "swc_reparam: N must be finite");
  SwcReparam rep;
  rep.cd = cd;
  rep.w = w;
  rep.lambda = lambda;
  rep.h = h;
  const double K = cd.K;
  const double N = cd.N;
  const double kappa = K / N;

  if (K == 0.0) {
    rep.l = [N](double r) { return std::sqrt(2.0 * N * r); };
    rep.l_inverse = [N](double theta) { return theta * theta / (2.0 * N); };
  } else if (K > 0.0) {
    rep.l = [K, kappa](double r) { return arccos_exp_neg(K * r) / std::sqrt(kappa); };
    rep.l_inverse = [K, kappa](double theta) {
      const double c = comp_c(kappa, theta);
      if (!(c > 0.0)) throw std::domain_error("swc_reparam: theta outside the range of l");
      return -std::log(c) / K;
    };
  } else {
    rep.l = [K, kappa](double r) { return arccosh_exp(-K * r) / std::sqrt(-kappa); };
    rep.l_inverse = [K, kappa](double theta) { return -std::log(comp_c(kappa, theta)) / K; };
  }

  const double l_hi = rep.l(lambda * h);
  const double l_lo = rep.l(h / lambda);
  if (K != 0.0 && w != 0.0) {
    const double sw = comp_s(kappa, w);
    if (!(sw > 0.0)) throw std::domain_error("swc_reparam: s_{K/N}(w) must be positive");
    rep.theta_h = [kappa, w, sw, l_hi, l_lo](double r) {
      return (l_hi * comp_s(kappa, w * r) + l_lo * comp_s(kappa, w * (1.0 - r))) / sw;
    };
  } else {
    rep.theta_h = [l_hi, l_lo](double r) { return l_hi * r + l_lo * (1.0 - r); };
  }
  rep.xi_h = [linv = rep.l_inverse, th = rep.theta_h](double r) { return linv(th(r)); };
  return rep;
}

TimeReparam SwcReparam::as_time_reparam() const {
  TimeReparam rep;
  rep.s = h / lambda;
  rep.t = lambda * h;
  rep.xi = xi_h;
  rep.eta = [](double r) { return r; };
  rep.eta_prime_analytic = [](double) { return 1.0; };
  return rep;
}

double swc_theta_ode_residual(const SwcReparam& rep, int n) {
  const double K = rep.cd.K;
  const double N = rep.cd.N;
  const double kappa = K / N;
  const double step = 1e-3;
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    const double r = static_cast<double>(i) / n;
    const double second =
        (rep.theta_h(r + step) - 2.0 * rep.theta_h(r) + rep.theta_h(r - step)) / (step * step);
    const double theta = rep.theta_h(r);
    const double rhs = -(K * rep.w * rep.w / (2.0 * N)) * comp_s(kappa, 2.0 * theta);
    worst = std::max(worst, std::abs(second - rhs));
  }
  return worst;
}

double wc_var_rhs(const CoefficientFamily& family, const TimeReparam& reparam, double W,
                  const ExponentPair& exponents, int quadrature_n) {
  require(W >= 0.0, "wc_var_rhs: W must be nonnegative");
  const double beta = exponents.beta;
  auto integrand = [&](double r) {
    const double x = reparam.xi(r);
    const double first = std::pow(family.a(x) * W * reparam.eta_prime(r), beta);
    const double second = std::pow(reparam.xi_prime(r) / family.b(x), beta);
    return first + second;
  };
  const double value = composite_simpson(integrand, 0.0, 1.0, quadrature_n);
  if (!std::isfinite(value)) throw std::runtime_error("wc_var_rhs: quadrature produced a non-finite value");
  return value;
}

}  // namespace ctl
