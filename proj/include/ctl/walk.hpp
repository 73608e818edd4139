#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ctl/manifold.hpp"
#include "ctl/rng.hpp"

namespace ctl {

/// How the frame at the first walker is chosen at each step.
enum class FramePolicy {
  Section,  // canonical_frame(x1) at every step
  Carried,  // canonical frame at the start, then transported along the x1 path
};

struct WalkConfig {
  int k = 20;                  // k^2 steps per unit time
  double horizon = 1.0;        // scaled time reached by the walk
  std::uint64_t seed = 1;
  int n_trajectories = 1000;
  FramePolicy frame_policy = FramePolicy::Section;
  int record_stride = 0;       // keep every n-th state; 0 keeps the endpoints only

  void validate() const;
  int steps() const;
};

struct CoupledState {
  Point x1;
  Point x2;
  Frame frame1;
};

struct CoupledWalkPath {
  std::vector<CoupledState> states;
  std::vector<double> times;
  double tau1 = 1.0;
  double tau2 = 1.0;
  int near_antipodal = 0;  // steps whose transport used the cut-locus tie-break
};

/// Uniform draw from the closed unit ball of R^m.
Eigen::VectorXd sample_unit_ball(int m, Rng& rng);

/// One coupled step of time k^{-2}: both walkers share the noise zeta through
/// parallel transport and move by exp(sqrt(tau) k^{-1} noise + tau k^{-2} Z).
CoupledState step_coupled(const ModelSpace& space, const CoupledState& state, double tau1,
                          double tau2, int k, Rng& rng,
                          FramePolicy policy = FramePolicy::Section,
                          int* near_antipodal = nullptr);

CoupledWalkPath run_coupled(const ModelSpace& space, const Point& x, const Point& y, double tau1,
                            double tau2, const WalkConfig& cfg, std::uint64_t trajectory = 0);

std::vector<Point> run_single(const ModelSpace& space, const Point& x, double tau,
                              const WalkConfig& cfg, std::uint64_t trajectory = 0);

struct CoupledTerminals {
  std::vector<Point> x1;
  std::vector<Point> x2;
  std::vector<double> distance;
  long near_antipodal = 0;
};

/// Terminal pairs of cfg.n_trajectories independent coupled walks.
CoupledTerminals sample_coupled_terminals(const ModelSpace& space, const Point& x, const Point& y,
                                          double tau1, double tau2, const WalkConfig& cfg,
                                          int jobs = 1);

/// Terminal points of cfg.n_trajectories independent single walks.
std::vector<Point> sample_single_terminals(const ModelSpace& space, const Point& x, double tau,
                                           const WalkConfig& cfg, int jobs = 1);

/// CSV rows: trajectory_id, step, t, x1 coords, x2 coords, distance.
void write_trajectory_csv(std::ostream& out, const ModelSpace& space,
                          const std::vector<CoupledWalkPath>& paths);

}  // namespace ctl
