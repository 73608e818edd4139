#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ctl/config.hpp"
#include "ctl/hopf_lax.hpp"
#include "ctl/lab.hpp"
#include "ctl/transport.hpp"
#include "ctl/walk.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitUsage = 2;

struct SpaceArgs {
  std::string kind = "euclidean";
  int dim = 2;
  double radius = 1.0;
  double curvature = -1.0;
  double lambda = 1.0;

  void add_to(CLI::App* app) {
    app->add_option("--space", kind, "euclidean, sphere, hyperbolic or ou")
        ->check(CLI::IsMember({"euclidean", "sphere", "hyperbolic", "ou"}));
    app->add_option("--dim", dim, "intrinsic dimension");
    app->add_option("--radius", radius, "sphere radius");
    app->add_option("--curvature", curvature, "hyperbolic curvature");
    app->add_option("--lambda", lambda, "OU rate");
  }
  ctl::ModelSpace build() const {
    return ctl::SpaceSpec{kind, dim, radius, curvature, lambda}.build();
  }
};

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw std::invalid_argument("bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

// Rows of embedding coordinates, optionally followed by a weight column.
// A first line that does not parse as numbers is treated as a header.
ctl::EmpiricalMeasure read_cloud(const ctl::ModelSpace& space, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  const int d = space.ambient_dim();
  std::vector<ctl::Point> pts;
  std::vector<double> w;
  std::string line;
  bool first = true;
  bool weighted = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    try {
      row = split_numbers(line);
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;
      }
      throw std::invalid_argument(path + ": unparsable row '" + line + "'");
    }
    if (pts.empty()) weighted = static_cast<int>(row.size()) == d + 1;
    if (static_cast<int>(row.size()) != d + (weighted ? 1 : 0)) {
      throw std::invalid_argument(path + ": expected " + std::to_string(d) + " coordinates per row");
    }
    first = false;
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i) c(i) = row[i];
    pts.push_back(space.make_point(c));
    w.push_back(weighted ? row[d] : 1.0);
  }
  if (pts.empty()) throw std::invalid_argument(path + ": no points");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw std::invalid_argument(path + ": negative weight");
    total += x;
  }
  if (!(total > 0.0)) throw std::invalid_argument(path + ": weights sum to zero");
  for (double& x : w) x /= total;
  return ctl::EmpiricalMeasure{std::move(pts), std::move(w)};
}

ctl::Point parse_point(const ctl::ModelSpace& space, const std::string& text) {
  const auto v = split_numbers(text);
  Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  if (c.size() != space.ambient_dim()) {
    throw ctl::GeometryError("point needs " + std::to_string(space.ambient_dim()) + " coordinates");
  }
  return space.make_point(c);
}

double grid_function(const std::string& name, double x) {
  if (name == "sin") return std::sin(x);
  if (name == "cos") return std::cos(x);
  if (name == "sin2") return std::sin(2.0 * x);
  if (name == "abs") return std::abs(x);
  if (name == "square") return x * x;
  if (name == "linear") return x;
  throw std::invalid_argument("unknown function '" + name + "' (sin, cos, sin2, abs, square, linear)");
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("ctl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CTL_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Curvature-dimension transport lab"};
  app.require_subcommand(1);

  // verify
  std::string config_path;
  std::string out_prefix;
  std::uint64_t seed = 0;
  int jobs = 0;
  auto* verify = app.add_subcommand("verify", "run a suite of inequality checks");
  verify->add_option("--config", config_path, "JSON config")->required();
  verify->add_option("--out", out_prefix, "output prefix for <out>.csv and <out>.json");
  verify->add_option("--seed", seed, "override the global seed");
  verify->add_option("--jobs", jobs, "worker threads");

  // simulate
  SpaceArgs sim_space;
  std::string sim_x, sim_y, sim_out;
  double sim_distance = 1.0, tau1 = 1.0, tau2 = 1.0, horizon = 1.0;
  int sim_k = 10, sim_n = 1, stride = 1;
  std::uint64_t sim_seed = 1;
  std::string policy = "section";
  auto* simulate = app.add_subcommand("simulate", "dump coupled random walk trajectories");
  sim_space.add_to(simulate);
  simulate->add_option("--x", sim_x, "first start point, comma separated embedding coordinates");
  simulate->add_option("--y", sim_y, "second start point");
  simulate->add_option("--distance", sim_distance, "distance of y from x when --y is absent");
  simulate->add_option("--tau1", tau1);
  simulate->add_option("--tau2", tau2);
  simulate->add_option("-k,--k", sim_k, "k^2 steps per unit time");
  simulate->add_option("-n,--n", sim_n, "number of trajectories");
  simulate->add_option("--horizon", horizon, "walk time");
  simulate->add_option("--stride", stride, "record every n-th step");
  simulate->add_option("--frame", policy)->check(CLI::IsMember({"section", "carried"}));
  simulate->add_option("--seed", sim_seed);
  simulate->add_option("--out", sim_out, "CSV path (stdout when absent)");
  simulate->add_option("--jobs", jobs);

  // wasserstein
  SpaceArgs w_space;
  std::string file_a, file_b, cost_kind = "pth", plan_out;
  double w_p = 2.0, kstar = 0.0, epsilon = 0.0;
  auto* wass = app.add_subcommand("wasserstein", "transport cost between two point clouds");
  w_space.add_to(wass);
  wass->add_option("file_a", file_a)->required();
  wass->add_option("file_b", file_b)->required();
  wass->add_option("-p,--p", w_p, "exponent");
  wass->add_option("--cost", cost_kind)->check(CLI::IsMember({"pth", "comparison"}));
  wass->add_option("--kstar", kstar, "curvature of the comparison cost");
  wass->add_option("--epsilon", epsilon, "use Sinkhorn at this regularization");
  wass->add_option("--out", plan_out, "write the optimal plan as CSV");
  wass->add_option("--jobs", jobs);

  // hopflax
  std::string grid_kind = "circle", f_name = "sin", hl_out;
  int grid_n = 256, order = 1;
  double a = -1.0, b = 1.0, grid_radius = 1.0, hl_s = 0.5, hl_p = 2.0;
  auto* hopflax = app.add_subcommand("hopflax", "Hopf-Lax semigroup on a grid");
  hopflax->add_option("--grid", grid_kind)->check(CLI::IsMember({"circle", "interval"}));
  hopflax->add_option("-n,--n", grid_n, "grid points");
  hopflax->add_option("--a", a, "interval start");
  hopflax->add_option("--b", b, "interval end");
  hopflax->add_option("--radius", grid_radius, "circle radius");
  hopflax->add_option("--f", f_name, "sin, cos, sin2, abs, square or linear of the coordinate");
  hopflax->add_option("-s,--s", hl_s);
  hopflax->add_option("-p,--p", hl_p);
  hopflax->add_option("--order", order)->check(CLI::IsMember({1, 2}));
  hopflax->add_option("--out", hl_out, "CSV path (stdout when absent)");

  // report
  std::string report_path;
  auto* report = app.add_subcommand("report", "validate and summarize a JSON report");
  report->add_option("input", report_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify) {
      ctl::ExperimentConfig cfg;
      try {
        cfg = ctl::load_config(config_path);
      } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitUsage;
      }
      if (verify->count("--seed")) {
        for (auto& c : cfg.checks) {
          if (c.seed == cfg.seed) c.seed = seed;
        }
        cfg.seed = seed;
      }
      if (jobs > 0) cfg.jobs = jobs;
      if (!out_prefix.empty()) cfg.output = out_prefix;
      spdlog::info("running {} checks with {} jobs", cfg.checks.size(), cfg.jobs);
      const auto reports = ctl::run_suite(cfg.checks, cfg.jobs);
      std::ofstream csv(cfg.output + ".csv");
      std::ofstream js(cfg.output + ".json");
      if (!csv || !js) {
        spdlog::error("cannot write reports under '{}'", cfg.output);
        return kExitUsage;
      }
      ctl::write_reports_csv(csv, reports);
      js << ctl::reports_to_json(reports).dump(2) << '\n';
      for (const auto& r : reports) {
        std::cout << r.id << (r.label.empty() ? "" : " [" + r.label + "]") << " " << r.space
                  << " margin=" << r.margin << " sigma=" << r.sigma << " " << ctl::to_string(r.verdict)
                  << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
      }
      return ctl::exit_code_for(reports);
    }

    if (*simulate) {
      ctl::ModelSpace space = sim_space.build();
      const ctl::Point x = sim_x.empty() ? space.base_point() : parse_point(space, sim_x);
      const ctl::Point y = sim_y.empty() ? space.point_at_distance(x, sim_distance) : parse_point(space, sim_y);
      ctl::WalkConfig cfg;
      cfg.k = sim_k;
      cfg.horizon = horizon;
      cfg.seed = sim_seed;
      cfg.n_trajectories = sim_n;
      cfg.record_stride = stride;
      cfg.frame_policy = policy == "carried" ? ctl::FramePolicy::Carried : ctl::FramePolicy::Section;
      cfg.validate();
      std::vector<ctl::CoupledWalkPath> paths(static_cast<std::size_t>(sim_n));
      ctl::parallel_for(paths.size(), std::max(1, jobs), [&](std::size_t i) {
        paths[i] = ctl::run_coupled(space, x, y, tau1, tau2, cfg, i);
      });
      if (sim_out.empty()) {
        ctl::write_trajectory_csv(std::cout, space, paths);
      } else {
        std::ofstream out(sim_out);
        if (!out) throw std::invalid_argument("cannot write '" + sim_out + "'");
        ctl::write_trajectory_csv(out, space, paths);
      }
      return kExitPass;
    }

    if (*wass) {
      ctl::ModelSpace space = w_space.build();
      const auto mu = read_cloud(space, file_a);
      const auto nu = read_cloud(space, file_b);
      const ctl::CostSpec cost =
          cost_kind == "pth" ? ctl::CostSpec::pth_power(w_p) : ctl::CostSpec::comparison(w_p, kstar);
      double value = 0.0;
      if (epsilon > 0.0) {
        const auto r = ctl::sinkhorn_cost(space, mu, nu, cost, epsilon);
        spdlog::info("sinkhorn: {} iterations, error bound {}", r.iterations, r.error_bound);
        value = r.value;
      } else {
        const auto r = ctl::exact_cost(space, mu, nu, cost);
        value = r.value;
        if (!plan_out.empty()) {
          std::ofstream out(plan_out);
          ctl::write_plan_csv(out, r.plan, 0.0);
        }
      }
      // pth-power costs are reported as the distance W_p
      if (cost_kind == "pth") value = std::pow(std::max(value, 0.0), 1.0 / w_p);
      std::cout.precision(17);
      std::cout << value << '\n';
      return kExitPass;
    }

    if (*hopflax) {
      const auto grid = grid_kind == "circle" ? ctl::FiniteMetricSpace::circle(grid_n, grid_radius)
                                              : ctl::FiniteMetricSpace::interval(a, b, grid_n);
      ctl::ScalarField f(grid_n);
      std::vector<double> coord(static_cast<std::size_t>(grid_n));
      for (int i = 0; i < grid_n; ++i) {
        coord[i] = grid_kind == "circle" ? 2.0 * M_PI * i / grid_n
                                         : a + (b - a) * i / static_cast<double>(grid_n - 1);
        f(i) = grid_function(f_name, coord[i]);
      }
      const ctl::ScalarField q = ctl::hopf_lax(grid, f, hl_s, hl_p);
      if (grid_n >= 16) {
        const auto res = ctl::hj_residual(grid, f, hl_s, hl_p, 0.0, order);
        spdlog::info("max interior HJ residual {}", res.max_included());
      }
      std::ofstream file;
      if (!hl_out.empty()) {
        file.open(hl_out);
        if (!file) throw std::invalid_argument("cannot write '" + hl_out + "'");
      }
      std::ostream& out = hl_out.empty() ? std::cout : file;
      out.precision(17);
      out << "i,x,f,Qf\n";
      for (int i = 0; i < grid_n; ++i) out << i << ',' << coord[i] << ',' << f(i) << ',' << q(i) << '\n';
      return kExitPass;
    }

    if (*report) {
      std::ifstream in(report_path);
      if (!in) {
        spdlog::error("cannot open '{}'", report_path);
        return kExitUsage;
      }
      std::vector<ctl::VerificationReport> reports;
      try {
        nlohmann::json doc;
        in >> doc;
        reports = ctl::reports_from_json(doc);
      } catch (const std::exception& e) {
        spdlog::error("invalid report: {}", e.what());
        return kExitUsage;
      }
      int counts[3] = {0, 0, 0};
      for (const auto& r : reports) ++counts[static_cast<int>(r.verdict)];
      std::cout << reports.size() << " checks: " << counts[0] << " pass, " << counts[1] << " fail, "
                << counts[2] << " inconclusive\n";
      ctl::write_reports_csv(std::cout, reports);
      return ctl::exit_code_for(reports);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
