#include "ctl/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace ctl {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys{"schema_version", "seed", "jobs", "output", "checks"};
const std::set<std::string> kSpaceKeys{"kind", "dim", "radius", "curvature", "lambda"};
const std::set<std::string> kCheckKeys{
    "id",        "label",  "space", "K",        "N",       "k_fallback",     "p",
    "beta",      "s",      "t",     "tau1",     "tau2",    "distance",       "measure",
    "cloud_size", "cloud_radius", "function", "times", "grid", "delta", "r",
    "h",         "dt",     "lambda", "n_trajectories", "k", "batch_size", "seed",
    "z",         "epsilon", "sigma_max"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad value for '" + key + "': " + e.what());
  }
}

CheckSpec parse_check(const json& c, std::uint64_t global_seed, std::size_t index) {
  const std::string where = "checks[" + std::to_string(index) + "]";
  if (!c.is_object()) throw ConfigError(where + ": must be an object");
  reject_unknown(c, kCheckKeys, where);
  if (!c.contains("id")) throw ConfigError(where + ": missing 'id'");
  CheckSpec spec;
  try {
    spec.id = check_id_from_string(c.at("id").get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  spec.seed = global_seed;
  if (c.contains("space")) {
    const json& s = c.at("space");
    if (!s.is_object()) throw ConfigError(where + ".space: must be an object");
    reject_unknown(s, kSpaceKeys, where + ".space");
    read(s, "kind", spec.space.kind, where);
    read(s, "dim", spec.space.dim, where);
    read(s, "radius", spec.space.radius, where);
    read(s, "curvature", spec.space.curvature, where);
    read(s, "lambda", spec.space.lambda, where);
  }
  if (c.contains("K")) spec.K = c.at("K").get<double>();
  if (c.contains("N")) {
    const json& n = c.at("N");
    spec.N = n.is_string() && n.get<std::string>() == "inf" ? kInfinity : n.get<double>();
  }
  read(c, "label", spec.label, where);
  read(c, "k_fallback", spec.k_fallback, where);
  read(c, "p", spec.p, where);
  read(c, "beta", spec.beta, where);
  read(c, "s", spec.s, where);
  read(c, "t", spec.t, where);
  read(c, "tau1", spec.tau1, where);
  read(c, "tau2", spec.tau2, where);
  read(c, "distance", spec.distance, where);
  read(c, "measure", spec.measure, where);
  read(c, "cloud_size", spec.cloud_size, where);
  read(c, "cloud_radius", spec.cloud_radius, where);
  read(c, "function", spec.function, where);
  read(c, "times", spec.times, where);
  read(c, "grid", spec.grid, where);
  read(c, "delta", spec.delta, where);
  read(c, "r", spec.r, where);
  read(c, "h", spec.h, where);
  read(c, "dt", spec.dt, where);
  read(c, "lambda", spec.lambda, where);
  read(c, "n_trajectories", spec.n_trajectories, where);
  read(c, "k", spec.k, where);
  read(c, "batch_size", spec.batch_size, where);
  read(c, "seed", spec.seed, where);
  read(c, "z", spec.z, where);
  read(c, "epsilon", spec.epsilon, where);
  read(c, "sigma_max", spec.sigma_max, where);
  try {
    spec.validate();
    spec.curvature_dimension();
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string() && v.get<std::string>() == "inf") return kInfinity;
  return v.get<double>();
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw ConfigError("unknown verdict '" + s + "'");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, kTopKeys, "config");
  ExperimentConfig cfg;
  if (!doc.contains("schema_version")) throw ConfigError("config: missing 'schema_version'");
  read(doc, "schema_version", cfg.schema_version, "config");
  if (cfg.schema_version != kSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  read(doc, "seed", cfg.seed, "config");
  read(doc, "jobs", cfg.jobs, "config");
  read(doc, "output", cfg.output, "config");
  if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (doc.contains("checks")) {
    const json& checks = doc.at("checks");
    if (!checks.is_array()) throw ConfigError("config: 'checks' must be an array");
    for (std::size_t i = 0; i < checks.size(); ++i) cfg.checks.push_back(parse_check(checks[i], cfg.seed, i));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(doc);
}

void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  const auto& cols = report_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  out.precision(17);
  for (const auto& r : reports) {
    out << r.id << ',' << r.space << ',' << r.K << ',' << r.N << ',' << r.p << ',' << r.beta << ','
        << r.s << ',' << r.t << ',' << r.tau1 << ',' << r.tau2 << ',' << r.lhs << ',' << r.rhs << ','
        << r.sigma << ',' << r.margin << ',' << to_string(r.verdict) << ',' << r.seed << '\n';
  }
}

json reports_to_json(const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  int counts[3] = {0, 0, 0};
  for (const auto& r : reports) {
    ++counts[static_cast<int>(r.verdict)];
    json meta = json::object();
    for (const auto& [k, v] : r.metadata) meta[k] = number_or_null(v);
    arr.push_back({{"id", r.id},
                   {"label", r.label},
                   {"space", r.space},
                   {"K", number_or_null(r.K)},
                   {"N", std::isinf(r.N) ? json("inf") : number_or_null(r.N)},
                   {"p", r.p},
                   {"beta", r.beta},
                   {"s", r.s},
                   {"t", r.t},
                   {"tau1", r.tau1},
                   {"tau2", r.tau2},
                   {"lhs", number_or_null(r.lhs)},
                   {"rhs", number_or_null(r.rhs)},
                   {"stderr_lhs", r.stderr_lhs},
                   {"stderr_rhs", r.stderr_rhs},
                   {"sigma", r.sigma},
                   {"margin", number_or_null(r.margin)},
                   {"tolerance", r.tolerance},
                   {"statistical", r.statistical},
                   {"verdict", to_string(r.verdict)},
                   {"seed", r.seed},
                   {"k", r.k},
                   {"n", r.n},
                   {"error", r.error},
                   {"metadata", meta}});
  }
  return {{"schema_version", kSchemaVersion},
          {"reports", arr},
          {"summary", {{"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}}}};
}

std::vector<VerificationReport> reports_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("reports") || !doc.at("reports").is_array()) {
    throw ConfigError("report: expected an object with a 'reports' array");
  }
  if (doc.value("schema_version", 0) != kSchemaVersion) throw ConfigError("report: bad schema_version");
  std::vector<VerificationReport> out;
  const char* required[] = {"id", "space", "K", "N", "p", "beta", "s", "t", "tau1", "tau2", "lhs",
                            "rhs", "stderr_lhs", "stderr_rhs", "sigma", "margin", "tolerance",
                            "statistical", "verdict", "seed"};
  for (const json& j : doc.at("reports")) {
    for (const char* key : required) {
      if (!j.contains(key)) throw ConfigError(std::string("report: missing field '") + key + "'");
    }
    VerificationReport r;
    try {
      r.id = j.at("id").get<std::string>();
      r.label = j.value("label", "");
      r.space = j.at("space").get<std::string>();
      r.K = number_from(j.at("K"));
      r.N = number_from(j.at("N"));
      r.p = j.at("p").get<double>();
      r.beta = j.at("beta").get<double>();
      r.s = j.at("s").get<double>();
      r.t = j.at("t").get<double>();
      r.tau1 = j.at("tau1").get<double>();
      r.tau2 = j.at("tau2").get<double>();
      r.lhs = number_from(j.at("lhs"));
      r.rhs = number_from(j.at("rhs"));
      r.stderr_lhs = j.at("stderr_lhs").get<double>();
      r.stderr_rhs = j.at("stderr_rhs").get<double>();
      r.sigma = j.at("sigma").get<double>();
      r.margin = number_from(j.at("margin"));
      r.tolerance = j.at("tolerance").get<double>();
      r.statistical = j.at("statistical").get<bool>();
      r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
      r.seed = j.at("seed").get<std::uint64_t>();
      r.k = j.value("k", 0);
      r.n = j.value("n", 0);
      r.error = j.value("error", "");
      if (j.contains("metadata")) {
        for (const auto& [k, v] : j.at("metadata").items()) r.metadata[k] = number_from(v);
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("report: mistyped field: ") + e.what());
    }
    if (r.error.empty()) {
      check_id_from_string(r.id);
      const double margin = r.rhs - r.lhs;
      if (std::abs(margin - r.margin) > 1e-12 * std::max(1.0, std::abs(margin))) {
        throw ConfigError("report: margin disagrees with rhs - lhs for " + r.id);
      }
      // The stored tolerance encodes z sigma or epsilon; recheck the verdict against it.
      Verdict expect = Verdict::Pass;
      if (!std::isfinite(r.margin)) {
        expect = Verdict::Inconclusive;
      } else if (r.margin < -r.tolerance) {
        expect = Verdict::Fail;
      } else if (r.margin < 0.0 && r.verdict == Verdict::Inconclusive) {
        expect = Verdict::Inconclusive;
      }
      if (expect != r.verdict) throw ConfigError("report: verdict inconsistent with margin for " + r.id);
    }
    out.push_back(r);
  }
  return out;
}

int exit_code_for(const std::vector<VerificationReport>& reports) {
  bool inconclusive = false;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Fail) return 1;
    if (r.verdict == Verdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

}  // namespace ctl
