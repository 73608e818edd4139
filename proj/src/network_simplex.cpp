#include "ctl/network_simplex.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ctl {

namespace {

constexpr double kMassScale = 17592186044416.0;  // 2^44

std::vector<std::int64_t> integer_masses(const Eigen::VectorXd& w, std::int64_t total) {
  std::vector<std::int64_t> out(w.size());
  std::int64_t sum = 0;
  Eigen::Index largest = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out[i] = static_cast<std::int64_t>(std::llround(w(i) / w.sum() * kMassScale));
    sum += out[i];
    if (out[i] > out[largest]) largest = i;
  }
  out[largest] += total - sum;
  if (out[largest] < 0) throw std::invalid_argument("solve_transport: mass rounding failed");
  return out;
}

class Simplex {
 public:
  Simplex(const std::vector<std::int64_t>& supply, const std::vector<std::int64_t>& demand,
          const Eigen::MatrixXd& cost)
      : n1_(static_cast<int>(supply.size())),
        n2_(static_cast<int>(demand.size())),
        root_(n1_ + n2_),
        n_nodes_(n1_ + n2_ + 1),
        n_real_(static_cast<long>(n1_) * n2_),
        cost_(cost) {
    const double cmax = cost.size() ? cost.cwiseAbs().maxCoeff() : 0.0;
    big_m_ = (cmax + 1.0) * n_nodes_;
    eps_ = 1e-12 * std::max(1.0, cmax);
    const long n_arcs = n_real_ + n1_ + n2_;
    flow_.assign(n_arcs, 0);
    in_tree_.assign(n_arcs, 0);
    for (int u = 0; u < n1_ + n2_; ++u) {
      const long a = n_real_ + u;
      flow_[a] = u < n1_ ? supply[u] : demand[u - n1_];
      in_tree_[a] = 1;
      tree_arcs_.push_back(a);
    }
    parent_.resize(n_nodes_);
    pred_.resize(n_nodes_);
    up_.resize(n_nodes_);
    depth_.resize(n_nodes_);
    pi_.resize(n_nodes_);
    rebuild();
  }

  long run() {
    long pivots = 0;
    const long block = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(n_real_))));
    long next = 0;
    while (true) {
      long entering = -1;
      double best = -eps_;
      long scanned = 0;
      long in_block = 0;
      while (scanned < n_real_) {
        const long a = next;
        next = next + 1 == n_real_ ? 0 : next + 1;
        ++scanned;
        ++in_block;
        if (!in_tree_[a]) {
          const double rc = reduced_cost(a);
          if (rc < best) {
            best = rc;
            entering = a;
          }
        }
        if (in_block == block) {
          if (entering >= 0) break;
          in_block = 0;
        }
      }
      if (entering < 0) break;
      pivot(entering);
      ++pivots;
    }
    for (long a = n_real_; a < static_cast<long>(flow_.size()); ++a) {
      if (flow_[a] != 0) throw std::runtime_error("solve_transport: artificial flow remains");
    }
    return pivots;
  }

  std::int64_t flow(int i, int j) const { return flow_[static_cast<long>(i) * n2_ + j]; }
  double potential(int u) const { return pi_[u]; }

 private:
  int src(long a) const { return a < n_real_ ? static_cast<int>(a / n2_) : (a - n_real_ < n1_ ? static_cast<int>(a - n_real_) : root_); }
  int dst(long a) const {
    if (a < n_real_) return n1_ + static_cast<int>(a % n2_);
    return a - n_real_ < n1_ ? root_ : static_cast<int>(a - n_real_);
  }
  double arc_cost(long a) const {
    return a < n_real_ ? cost_(a / n2_, a % n2_) : big_m_;
  }
  double reduced_cost(long a) const { return arc_cost(a) + pi_[src(a)] - pi_[dst(a)]; }

  void rebuild() {
    std::vector<int> deg(n_nodes_ + 1, 0);
    for (long a : tree_arcs_) {
      ++deg[src(a) + 1];
      ++deg[dst(a) + 1];
    }
    std::partial_sum(deg.begin(), deg.end(), deg.begin());
    std::vector<long> adj(deg.back());
    std::vector<int> fill(deg.begin(), deg.end() - 1);
    for (long a : tree_arcs_) {
      adj[fill[src(a)]++] = a;
      adj[fill[dst(a)]++] = a;
    }
    std::vector<int> queue{root_};
    queue.reserve(n_nodes_);
    parent_[root_] = -1;
    pred_[root_] = -1;
    depth_[root_] = 0;
    pi_[root_] = 0.0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (int k = deg[u]; k < deg[u + 1]; ++k) {
        const long a = adj[k];
        if (a == pred_[u]) continue;
        const bool forward = src(a) == u;
        const int v = forward ? dst(a) : src(a);
        parent_[v] = u;
        pred_[v] = a;
        up_[v] = !forward;  // arc points from v towards its parent
        depth_[v] = depth_[u] + 1;
        pi_[v] = forward ? pi_[u] + arc_cost(a) : pi_[u] - arc_cost(a);
        queue.push_back(v);
      }
    }
    if (static_cast<int>(queue.size()) != n_nodes_) throw std::logic_error("solve_transport: tree disconnected");
  }

  void pivot(long entering) {
    const int first = src(entering);
    const int second = dst(entering);
    int x = first;
    int y = second;
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        x = parent_[x];
      } else {
        y = parent_[y];
      }
    }
    const int join = x;
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
    std::int64_t delta = kInf;
    int leave_node = -1;
    for (int u = first; u != join; u = parent_[u]) {
      const std::int64_t cap = up_[u] ? flow_[pred_[u]] : kInf;
      if (cap < delta) {
        delta = cap;
        leave_node = u;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      const std::int64_t cap = up_[u] ? kInf : flow_[pred_[u]];
      if (cap <= delta) {
        delta = cap;
        leave_node = u;
      }
    }
    if (leave_node < 0) throw std::runtime_error("solve_transport: unbounded pivot");
    if (delta > 0) {
      flow_[entering] += delta;
      for (int u = first; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? -delta : delta;
      for (int u = second; u != join; u = parent_[u]) flow_[pred_[u]] += up_[u] ? delta : -delta;
    }
    const long leaving = pred_[leave_node];
    in_tree_[leaving] = 0;
    in_tree_[entering] = 1;
    for (long& a : tree_arcs_) {
      if (a == leaving) {
        a = entering;
        break;
      }
    }
    rebuild();
  }

  int n1_, n2_, root_, n_nodes_;
  long n_real_;
  const Eigen::MatrixXd& cost_;
  double big_m_ = 0.0;
  double eps_ = 0.0;
  std::vector<std::int64_t> flow_;
  std::vector<char> in_tree_;
  std::vector<long> tree_arcs_;
  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<char> up_;
  std::vector<int> depth_;
  std::vector<double> pi_;
};

}  // namespace

TransportSolution solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                  const Eigen::MatrixXd& cost) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("solve_transport: empty marginal");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw std::invalid_argument("solve_transport: cost shape does not match marginals");
  }
  if ((a.array() < 0.0).any() || (b.array() < 0.0).any()) {
    throw std::invalid_argument("solve_transport: negative mass");
  }
  if (!cost.allFinite()) throw std::invalid_argument("solve_transport: non-finite cost");

  // Zero-mass points are dropped so every initial tree arc carries flow.
  std::vector<int> rows;
  std::vector<int> cols;
  for (Eigen::Index i = 0; i < a.size(); ++i) if (a(i) > 0.0) rows.push_back(static_cast<int>(i));
  for (Eigen::Index j = 0; j < b.size(); ++j) if (b(j) > 0.0) cols.push_back(static_cast<int>(j));
  if (rows.empty() || cols.empty()) throw std::invalid_argument("solve_transport: zero total mass");
  Eigen::VectorXd ar(rows.size());
  Eigen::VectorXd br(cols.size());
  Eigen::MatrixXd cr(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ar(i) = a(rows[i]);
  for (std::size_t j = 0; j < cols.size(); ++j) br(j) = b(cols[j]);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) cr(i, j) = cost(rows[i], cols[j]);
  }
  const auto total = static_cast<std::int64_t>(kMassScale);
  Simplex simplex(integer_masses(ar, total), integer_masses(br, total), cr);

  TransportSolution sol;
  sol.pivots = simplex.run();
  sol.plan = Eigen::MatrixXd::Zero(a.size(), b.size());
  sol.phi = Eigen::VectorXd::Zero(a.size());
  sol.psi = Eigen::VectorXd::Zero(b.size());
  const double total_mass = a.sum();
  const int n1 = static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sol.phi(rows[i]) = -simplex.potential(static_cast<int>(i));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const std::int64_t f = simplex.flow(static_cast<int>(i), static_cast<int>(j));
      if (f != 0) sol.plan(rows[i], cols[j]) = static_cast<double>(f) / kMassScale * total_mass;
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    sol.psi(cols[j]) = simplex.potential(n1 + static_cast<int>(j));
  }
  // Potentials of dropped points: the tightest value keeping dual feasibility.
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) > 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int j : cols) best = std::min(best, cost(i, j) - sol.psi(j));
    sol.phi(i) = best;
  }
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b(j) > 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < a.size(); ++i) best = std::min(best, cost(i, j) - sol.phi(i));
    sol.psi(j) = best;
  }
  sol.cost = (sol.plan.array() * cost.array()).sum();
  return sol;
}

}  // namespace ctl
