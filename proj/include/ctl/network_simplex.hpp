#pragma once

#include <Eigen/Dense>

namespace ctl {

struct TransportSolution {
  double cost = 0.0;
  Eigen::MatrixXd plan;  // rows: sources, columns: targets
  Eigen::VectorXd phi;   // dual potentials with phi_i + psi_j <= C_ij
  Eigen::VectorXd psi;
  long pivots = 0;
};

/// Exact discrete optimal transport by primal network simplex on the complete
/// bipartite graph. Masses are rounded to a common integer grid of 2^-44 so
/// pivoting is exact; block-search pricing and a strongly feasible spanning
/// tree keep the run deterministic and cycle-free.
TransportSolution solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                  const Eigen::MatrixXd& cost);

}  // namespace ctl
