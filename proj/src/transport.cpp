#include "ctl/transport.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "ctl/rng.hpp"

namespace ctl {

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Point> points) {
  if (points.empty()) throw std::invalid_argument("EmpiricalMeasure: no points");
  EmpiricalMeasure m;
  m.weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
  m.points = std::move(points);
  return m;
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Point& x) { return {{x}, {1.0}}; }

Eigen::VectorXd EmpiricalMeasure::weight_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
}

void EmpiricalMeasure::validate() const {
  if (points.empty()) throw std::invalid_argument("EmpiricalMeasure: no points");
  if (points.size() != weights.size()) {
    throw std::invalid_argument("EmpiricalMeasure: points and weights differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("EmpiricalMeasure: bad weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("EmpiricalMeasure: weights must sum to 1");
}

double CouplingMatrix::marginal_error(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const {
  const Eigen::VectorXd rows = pi.rowwise().sum();
  const Eigen::VectorXd cols = pi.colwise().sum().transpose();
  return std::max((rows - mu.weight_vector()).cwiseAbs().maxCoeff(),
                  (cols - nu.weight_vector()).cwiseAbs().maxCoeff());
}

CostSpec CostSpec::pth_power(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("CostSpec: p must be >= 1");
  return {Kind::PthPowerDistance, p, 0.0};
}

CostSpec CostSpec::comparison(double p, double kstar) {
  if (!(p >= 1.0)) throw std::invalid_argument("CostSpec: p must be >= 1");
  return {Kind::ComparisonCost, p, kstar};
}

double CostSpec::operator()(double d) const {
  if (kind == Kind::PthPowerDistance) return std::pow(d, p);
  return std::pow(comp_s(kstar, 0.5 * d), p);
}

Eigen::MatrixXd cost_matrix(const ModelSpace& space, const std::vector<Point>& xs,
                            const std::vector<Point>& ys, const CostSpec& cost, int jobs) {
  Eigen::MatrixXd c(xs.size(), ys.size());
  parallel_for(xs.size(), jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < ys.size(); ++j) c(i, j) = cost(space.geodesic(xs[i], ys[j]).length);
  });
  return c;
}

ExactResult exact_cost(const ModelSpace& space, const EmpiricalMeasure& mu,
                       const EmpiricalMeasure& nu, const CostSpec& cost) {
  mu.validate();
  nu.validate();
  if (mu.size() > kExactSupportCap || nu.size() > kExactSupportCap) {
    throw std::invalid_argument("exact_cost: support exceeds " + std::to_string(kExactSupportCap) +
                                " points; use sinkhorn_cost or batched_cost");
  }
  const Eigen::MatrixXd c = cost_matrix(space, mu.points, nu.points, cost);
  TransportSolution sol = solve_transport(mu.weight_vector(), nu.weight_vector(), c);
  return {sol.cost, CouplingMatrix{std::move(sol.plan)}, std::move(sol.phi), std::move(sol.psi)};
}

double wasserstein(const ModelSpace& space, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                   double p) {
  return std::pow(std::max(0.0, exact_cost(space, mu, nu, CostSpec::pth_power(p)).value), 1.0 / p);
}

namespace {

// -eps log sum_k exp((v_k - c_k)/eps) + log-weights, stabilized by the max.
double soft_min(const Eigen::Ref<const Eigen::VectorXd>& shifted, const Eigen::VectorXd& log_w,
                double eps) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < shifted.size(); ++k) mx = std::max(mx, shifted(k) / eps + log_w(k));
  double s = 0.0;
  for (Eigen::Index k = 0; k < shifted.size(); ++k) s += std::exp(shifted(k) / eps + log_w(k) - mx);
  return -eps * (mx + std::log(s));
}

}  // namespace

SinkhornResult sinkhorn_cost(const ModelSpace& space, const EmpiricalMeasure& mu,
                             const EmpiricalMeasure& nu, const CostSpec& cost, double epsilon,
                             int max_iter, double tol) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn_cost: epsilon must be positive");
  if (max_iter < 1) throw std::invalid_argument("sinkhorn_cost: max_iter must be positive");
  mu.validate();
  nu.validate();
  const Eigen::MatrixXd c = cost_matrix(space, mu.points, nu.points, cost);
  const Eigen::VectorXd a = mu.weight_vector();
  const Eigen::VectorXd b = nu.weight_vector();
  const Eigen::Index n1 = c.rows();
  const Eigen::Index n2 = c.cols();
  const Eigen::VectorXd log_a = a.array().log();
  const Eigen::VectorXd log_b = b.array().log();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n1);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n2);

  auto update = [&](double eps) {
    for (Eigen::Index i = 0; i < n1; ++i) f(i) = soft_min(g - c.row(i).transpose(), log_b, eps);
    for (Eigen::Index j = 0; j < n2; ++j) g(j) = soft_min(f - c.col(j), log_a, eps);
  };
  auto plan = [&](double eps) {
    Eigen::MatrixXd p(n1, n2);
    for (Eigen::Index i = 0; i < n1; ++i) {
      for (Eigen::Index j = 0; j < n2; ++j) {
        p(i, j) = std::exp((f(i) + g(j) - c(i, j)) / eps + log_a(i) + log_b(j));
      }
    }
    return p;
  };

  const double cmax = std::max(c.maxCoeff(), epsilon);
  int iterations = 0;
  for (double eps = cmax; eps > epsilon; eps *= 0.5) {
    for (int k = 0; k < 10 && iterations < max_iter; ++k, ++iterations) update(eps);
  }
  double err = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd p;
  while (iterations < max_iter) {
    update(epsilon);
    ++iterations;
    if (iterations % 10 == 0) {
      p = plan(epsilon);
      err = (p.rowwise().sum() - a).cwiseAbs().sum();
      if (err < tol) break;
    }
  }
  if (!(err < tol)) {
    throw std::runtime_error("sinkhorn_cost: no convergence within max_iter; marginal error " +
                             std::to_string(err));
  }

  SinkhornResult res;
  res.iterations = iterations;
  res.value = (p.array() * c.array()).sum();
  // Dual lower bound from the c-transform of f.
  double lower = a.dot(f);
  for (Eigen::Index j = 0; j < n2; ++j) lower += b(j) * (c.col(j) - f).minCoeff();
  res.lower_bound = lower;
  // Primal upper bound from the rounded (exactly feasible) plan.
  Eigen::MatrixXd r = p;
  const Eigen::VectorXd row_scale = (a.array() / r.rowwise().sum().array()).min(1.0);
  r = row_scale.asDiagonal() * r;
  const Eigen::RowVectorXd col_scale = (b.transpose().array() / r.colwise().sum().array()).min(1.0);
  r = r * col_scale.asDiagonal();
  const Eigen::VectorXd ea = a - r.rowwise().sum();
  const Eigen::VectorXd eb = b - r.colwise().sum().transpose();
  const double missing = ea.sum();
  if (missing > 0.0) r += ea * eb.transpose() / missing;
  const double upper = (r.array() * c.array()).sum();
  res.error_bound = std::max({res.value - lower, upper - res.value, 0.0});
  return res;
}

double gaussian_w2(int m, const Eigen::VectorXd& x, const Eigen::VectorXd& y, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw std::invalid_argument("gaussian_w2: times must be nonnegative");
  if (x.size() != m || y.size() != m) throw std::invalid_argument("gaussian_w2: dimension mismatch");
  const double gap = std::sqrt(t) - std::sqrt(s);
  return std::sqrt((x - y).squaredNorm() + 2.0 * m * gap * gap);
}

double bootstrap_std_error(const std::vector<double>& values, int n_bootstrap, std::uint64_t seed) {
  const std::size_t n = values.size();
  if (n < 2 || n_bootstrap < 2) return 0.0;
  Rng rng(seed, 0xB007);
  std::vector<double> means(n_bootstrap);
  std::vector<double> draw(n);
  for (int r = 0; r < n_bootstrap; ++r) {
    for (std::size_t i = 0; i < n; ++i) draw[i] = values[rng.below(n)];
    means[r] = pairwise_sum(draw) / static_cast<double>(n);
  }
  return std::sqrt(mean_stats(means).variance);
}

CostEstimate batched_cost(const ModelSpace& space, const std::vector<Point>& xs,
                          const std::vector<Point>& ys, const CostSpec& cost,
                          std::size_t batch_size, int n_bootstrap, std::uint64_t seed, int jobs) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("batched_cost: samples must be nonempty and of equal size");
  }
  if (batch_size < 1 || batch_size > kExactSupportCap) {
    throw std::invalid_argument("batched_cost: batch size must lie in [1, 512]");
  }
  const std::size_t n = xs.size();
  const std::size_t n_batches = (n + batch_size - 1) / batch_size;
  const std::size_t per = n / n_batches;  // equal batches; the remainder is dropped
  CostEstimate est;
  est.batch_values.assign(n_batches, 0.0);
  parallel_for(n_batches, jobs, [&](std::size_t k) {
    std::vector<Point> bx(xs.begin() + k * per, xs.begin() + (k + 1) * per);
    std::vector<Point> by(ys.begin() + k * per, ys.begin() + (k + 1) * per);
    est.batch_values[k] = exact_cost(space, EmpiricalMeasure::uniform(std::move(bx)),
                                     EmpiricalMeasure::uniform(std::move(by)), cost)
                              .value;
  });
  est.value = pairwise_sum(est.batch_values) / static_cast<double>(n_batches);
  est.std_error = bootstrap_std_error(est.batch_values, n_bootstrap, seed);
  return est;
}

void write_plan_csv(std::ostream& out, const CouplingMatrix& plan, double threshold) {
  out << "i,j,mass\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < plan.pi.rows(); ++i) {
    for (Eigen::Index j = 0; j < plan.pi.cols(); ++j) {
      if (plan.pi(i, j) > threshold) out << i << ',' << j << ',' << plan.pi(i, j) << '\n';
    }
  }
}

}  // namespace ctl
