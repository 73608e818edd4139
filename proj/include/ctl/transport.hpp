#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ctl/manifold.hpp"
#include "ctl/network_simplex.hpp"

namespace ctl {

/// Finitely supported probability measure on a model space.
struct EmpiricalMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  static EmpiricalMeasure uniform(std::vector<Point> points);
  static EmpiricalMeasure dirac(const Point& x);
  std::size_t size() const { return points.size(); }
  Eigen::VectorXd weight_vector() const;
  /// Weights nonnegative, summing to 1 within 1e-12, one per point.
  void validate() const;
};

struct CouplingMatrix {
  Eigen::MatrixXd pi;

  /// Largest marginal violation against the given weights.
  double marginal_error(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const;
};

/// Ground cost as a function of geodesic distance.
struct CostSpec {
  enum class Kind { PthPowerDistance, ComparisonCost };
  Kind kind = Kind::PthPowerDistance;
  double p = 2.0;
  double kstar = 0.0;

  /// c(x, y) = d(x, y)^p.
  static CostSpec pth_power(double p);
  /// c(x, y) = s_{kstar}(d(x, y)/2)^p.
  static CostSpec comparison(double p, double kstar);
  double operator()(double d) const;
};

constexpr std::size_t kExactSupportCap = 512;

Eigen::MatrixXd cost_matrix(const ModelSpace& space, const std::vector<Point>& xs,
                            const std::vector<Point>& ys, const CostSpec& cost, int jobs = 1);

struct ExactResult {
  double value = 0.0;
  CouplingMatrix plan;
  Eigen::VectorXd phi;  // dual potentials: phi_i + psi_j <= c(x_i, y_j)
  Eigen::VectorXd psi;
};

/// Exact optimum of the finite transport problem; supports up to 512 points each.
ExactResult exact_cost(const ModelSpace& space, const EmpiricalMeasure& mu,
                       const EmpiricalMeasure& nu, const CostSpec& cost);

/// W_p(mu, nu) from the exact solver.
double wasserstein(const ModelSpace& space, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                   double p);

struct SinkhornResult {
  double value = 0.0;        // <C, pi_epsilon>
  double error_bound = 0.0;  // bound on |value - exact optimum|
  double lower_bound = 0.0;  // dual value of the c-transformed potentials
  int iterations = 0;
};

/// Log-domain Sinkhorn with epsilon scaling; throws if the L1 row-marginal error does
/// not fall below `tol` within max_iter iterations at the target epsilon.
SinkhornResult sinkhorn_cost(const ModelSpace& space, const EmpiricalMeasure& mu,
                             const EmpiricalMeasure& nu, const CostSpec& cost, double epsilon,
                             int max_iter = 100000, double tol = 1e-5);

/// W_2 between N(x, 2sI) and N(y, 2tI) on R^m.
double gaussian_w2(int m, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double s, double t);

struct CostEstimate {
  double value = 0.0;      // mean over batches of the exact batch cost
  double std_error = 0.0;  // bootstrap standard error of that mean
  std::vector<double> batch_values;
};

/// Transport cost between the laws sampled by xs and ys: both samples are cut
/// into equal consecutive batches of at most `batch_size` points and each
/// batch pair is solved exactly. The mean overestimates the population cost.
CostEstimate batched_cost(const ModelSpace& space, const std::vector<Point>& xs,
                          const std::vector<Point>& ys, const CostSpec& cost,
                          std::size_t batch_size = 500, int n_bootstrap = 200,
                          std::uint64_t seed = 7, int jobs = 1);

/// Bootstrap standard error of the mean of `values`.
double bootstrap_std_error(const std::vector<double>& values, int n_bootstrap, std::uint64_t seed);

/// CSV rows i, j, mass for entries above `threshold`.
void write_plan_csv(std::ostream& out, const CouplingMatrix& plan, double threshold = 0.0);

}  // namespace ctl
