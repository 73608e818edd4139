#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace ctl {

/// One splitmix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the independent stream `index` under `master`.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// Reproducible generator: mt19937_64 with hand-rolled uniform and normal
/// transforms so draws do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t index) : engine_(stream_seed(master, index)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  Eigen::VectorXd normal_vector(int m);
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must write
/// to disjoint outputs. Exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Pairwise summation in fixed order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

struct MeanStats {
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance
  double std_error = 0.0;  // sqrt(variance / n)
  std::size_t n = 0;
};

MeanStats mean_stats(const std::vector<double>& v);

}  // namespace ctl
