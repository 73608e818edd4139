#pragma once

#include <functional>
#include <vector>

namespace ctl {

using RealFn = std::function<double(double)>;

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
/// Throws std::runtime_error if the recursion depth is exhausted before
/// the local error estimate drops below its share of the tolerance.
double adaptive_simpson(const RealFn& f, double a, double b, double tol = 1e-10,
                        int max_depth = 60);

/// Composite Simpson with `n` intervals (n is rounded up to even).
double composite_simpson(const RealFn& f, double a, double b, int n = 256);

/// Central difference with one Richardson step, O(h^4) truncation.
double richardson_derivative(const RealFn& f, double x, double h = 1e-3);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Gauss-Hermite rule normalized to the standard normal law:
/// sum_i w_i g(x_i) ~ E[g(G)], G ~ N(0, 1). Weights sum to 1.
QuadratureRule gauss_hermite_probabilists(int n);

}  // namespace ctl
