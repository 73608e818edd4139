#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctl/comparison.hpp"
#include "ctl/manifold.hpp"

namespace ctl {

/// Parameters violate the strict diameter bound d < pi sqrt((N-1)/K).
class DiameterViolation : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

enum class CheckId {
  W2Control,
  Swc,
  Wp,
  PreCtl,
  BL0,
  BLp,
  BLInt,
  Gamma2,
  LaplacianComparison,
  Lp2,
  WvarOde,
  MonoApp,
};

std::string to_string(CheckId id);
/// Throws std::invalid_argument for unknown ids.
CheckId check_id_from_string(const std::string& name);
bool is_statistical(CheckId id);

struct SpaceSpec {
  std::string kind = "euclidean";  // euclidean, sphere, hyperbolic, ou
  int dim = 2;
  double radius = 1.0;
  double curvature = -1.0;
  double lambda = 1.0;

  ModelSpace build() const;
};

struct CheckSpec {
  CheckId id = CheckId::W2Control;
  std::string label;
  SpaceSpec space;
  std::optional<double> K;  // default: the space's K, times k_fallback on spheres for statistical checks
  std::optional<double> N;  // default: the space's N
  double k_fallback = 0.9;
  double p = 2.0;
  double beta = 2.0;
  double s = 0.25;
  double t = 1.0;
  double tau1 = 0.2;
  double tau2 = 0.4;
  double distance = 1.0;           // between the two Dirac masses / cloud centers
  std::string measure = "dirac";   // dirac or cloud
  int cloud_size = 20;
  double cloud_radius = 0.2;
  std::string function = "cos";
  std::vector<double> times{0.1, 0.5, 1.0};
  int grid = 64;
  double delta = 0.1;
  double r = 0.5;  // mono_app exponent
  double h = 1e-3;
  double dt = 1e-4;
  double lambda = 2.0;  // wvar_ode time dilation
  int n_trajectories = 5000;
  int k = 30;
  std::size_t batch_size = 500;
  std::uint64_t seed = 1;
  double z = 3.0;
  double epsilon = 1e-5;
  double sigma_max = kInfinity;

  CurvatureDimension curvature_dimension() const;
  void validate() const;
};

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct VerificationReport {
  std::string id;
  std::string label;
  std::string space;
  double K = 0.0;
  double N = kInfinity;
  double p = 2.0;
  double beta = 2.0;
  double s = 0.0;
  double t = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double stderr_lhs = 0.0;
  double stderr_rhs = 0.0;
  double sigma = 0.0;  // combined in quadrature
  double margin = 0.0;  // rhs - lhs
  double tolerance = 0.0;  // z sigma or epsilon
  bool statistical = false;
  Verdict verdict = Verdict::Pass;
  std::uint64_t seed = 0;
  int k = 0;
  int n = 0;
  std::string error;
  std::map<std::string, double> metadata;

  /// Recomputes the verdict from the stored numbers.
  Verdict recomputed_verdict(double z, double epsilon, double sigma_max) const;
};

/// fail: margin < -tol; inconclusive: -tol <= margin < 0 with sigma > sigma_max;
/// pass otherwise. tol = z sigma for statistical checks, epsilon otherwise.
Verdict decide_verdict(double margin, double sigma, bool statistical, double z, double epsilon,
                       double sigma_max);

VerificationReport check_w2_control(const CheckSpec& spec, int jobs = 1);
VerificationReport check_swc(const CheckSpec& spec, int jobs = 1);
VerificationReport check_wp(const CheckSpec& spec, int jobs = 1);
VerificationReport check_prectl(const CheckSpec& spec, int jobs = 1);
VerificationReport check_bl0(const CheckSpec& spec);
VerificationReport check_blp(const CheckSpec& spec);
VerificationReport check_bl_int(const CheckSpec& spec);
VerificationReport check_gamma2(const CheckSpec& spec);
VerificationReport check_laplacian_comparison(const CheckSpec& spec);
VerificationReport check_lp2(const CheckSpec& spec, int jobs = 1);
VerificationReport check_wvar_ode(const CheckSpec& spec, int jobs = 1);
VerificationReport check_mono_app(const CheckSpec& spec);

VerificationReport run_check(const CheckSpec& spec, int jobs = 1);
/// Runs every spec in order; exceptions become reports with `error` set and
/// an inconclusive verdict.
std::vector<VerificationReport> run_suite(const std::vector<CheckSpec>& specs, int jobs = 1);

/// RHS of the space-time Wasserstein control for the Bakry-Ledoux family:
/// coeff_A^beta W^beta + J([s,t])^beta.
double w2_control_rhs(const CurvatureDimension& cd, double s, double t, double W, double beta);

}  // namespace ctl
