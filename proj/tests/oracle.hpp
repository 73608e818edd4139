#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ctl/comparison.hpp"

namespace oracle {

// Adaptive 31-point Gauss-Kronrod in long double.
inline double integrate(const std::function<long double(long double)>& f, double a, double b) {
  long double err = 0;
  return static_cast<double>(boost::math::quadrature::gauss_kronrod<long double, 31>::integrate(
      f, static_cast<long double>(a), static_cast<long double>(b), 20, 1e-15L, &err));
}

inline long double b_coeff(double K, double N, long double r) {
  if (K == 0.0) return std::sqrt(2.0L * r / N);
  return std::sqrt(std::expm1(2.0L * K * r) / (N * K));
}

inline double j_measure(double K, double N, double s, double t) {
  return integrate([=](long double r) { return 1.0L / b_coeff(K, N, r); }, s, t);
}

inline double coeff_A(double K, double N, double s, double t) {
  const double i = integrate([=](long double r) { return std::exp(K * r) / b_coeff(K, N, r); }, s, t);
  return j_measure(K, N, s, t) / i;
}

inline double sinh_series(double x) {
  long double term = x, sum = x;
  for (int n = 1; n < 40; ++n) {
    term *= static_cast<long double>(x) * x / ((2 * n) * (2 * n + 1));
    sum += term;
  }
  return static_cast<double>(sum);
}

// Minimum of sum_i C(i, sigma(i)) over all permutations; equals the optimal
// transport cost between uniform measures of equal size n (divided by n).
template <typename Matrix>
double assignment_brute_force(const Matrix& c) {
  const int n = static_cast<int>(c.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// Critical value at level alpha = 0.01.
inline double ks_critical_01(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace oracle
