#include "sparsedens/serialization.hpp"

#include "sparsedens/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace sparsedens {
namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void csv_field(std::ostream& out, std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    out << text;
    return;
  }
  out << '"';
  for (char c : text) {
    if (c == '"') out << '"';
    out << (c == '\n' ? ' ' : c);
  }
  out << '"';
}

}  // namespace

std::string_view version() { return SPARSEDENS_VERSION; }

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

void write_header(std::ostream& out, const OutputHeader& header) {
  out << "# sparsedens " << version() << '\n';
  out << "# command: " << header.command << '\n';
  out << "# config_digest: " << digest_hex(header.config_digest) << '\n';
}

json header_json(const OutputHeader& header) {
  return {{"tool", "sparsedens"},
          {"version", std::string(version())},
          {"command", header.command},
          {"config_digest", digest_hex(header.config_digest)}};
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

json to_json(const EmpiricalStats& s) {
  return {{"n", s.n},
          {"gamma", s.gamma},
          {"log_M", s.log_M},
          {"beta_hat", to_json(s.beta_hat)},
          {"sigma_hat_sq", to_json(s.sigma_hat_sq)},
          {"sigma_tilde_sq", to_json(s.sigma_tilde_sq)},
          {"eta", to_json(s.eta)}};
}

json to_json(const SolverReport& r) {
  return {{"iterations", r.iterations},
          {"max_constraint_violation", number(r.max_constraint_violation)},
          {"objective", number(r.objective)},
          {"status", std::string(to_string(r.status))},
          {"duality_gap_or_kkt_residual", number(r.duality_gap_or_kkt_residual)}};
}

json to_json(const CoefficientVector& c) {
  return {{"method", std::string(to_string(c.method))},
          {"size", c.values.size()},
          {"l1_norm", c.l1_norm},
          {"support", c.support},
          {"values", to_json(c.values)}};
}

json to_json(const BoxplotStats& b) {
  return {{"count", b.count},   {"mean", number(b.mean)},       {"min", number(b.min)},
          {"q1", number(b.q1)}, {"median", number(b.median)},   {"q3", number(b.q3)},
          {"max", number(b.max)}, {"whisker_low", number(b.whisker_low)}, {"whisker_high", number(b.whisker_high)}};
}

json to_json(const RunResult& r) {
  const auto& c = r.config;
  return {{"density", std::string(to_string(c.density))},
          {"dictionary", std::string(to_string(c.dictionary))},
          {"n", c.n},
          {"gamma", c.gamma},
          {"method", std::string(to_string(c.method))},
          {"replications", c.replications},
          {"seed", c.seed},
          {"failures", r.failures},
          {"risk", to_json(r.risk)}};
}

json to_json(const AssumptionCheck& c) {
  return {{"s", c.s},
          {"l", c.l},
          {"phi_min_2s", number(c.phi_min_2s)},
          {"theta_s_2s", number(c.theta_s_2s)},
          {"phi_min_s_plus_l", number(c.phi_min_s_plus_l)},
          {"phi_max_l", number(c.phi_max_l)},
          {"assumption1", c.assumption1},
          {"assumption2", c.assumption2},
          {"kappa1", number(c.kappa1)},
          {"mu1", number(c.mu1)},
          {"kappa2", number(c.kappa2)},
          {"mu2", number(c.mu2)}};
}

json to_json(const StructuralReport& r) {
  json phi_min = json::object();
  json phi_max = json::object();
  for (auto [l, v] : r.phi_min) phi_min[std::to_string(l)] = number(v);
  for (auto [l, v] : r.phi_max) phi_max[std::to_string(l)] = number(v);
  json theta = json::array();
  for (auto [key, v] : r.theta) theta.push_back({{"l", key.first}, {"l_prime", key.second}, {"theta", number(v)}});
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"M", r.size}, {"l_max", r.l_max}, {"phi_min", phi_min}, {"phi_max", phi_max},
          {"theta", theta}, {"checks", checks}};
}

json to_json(const GramSummary& s) {
  return {{"min_eigenvalue", s.min_eigenvalue},
          {"max_eigenvalue", s.max_eigenvalue},
          {"max_off_diagonal", s.max_off_diagonal},
          {"identity_deviation", s.identity_deviation},
          {"symmetry_deviation", s.symmetry_deviation}};
}

GramMatrix gram_from_json(const json& j) {
  const json& rows = j.is_object() ? j.at("gram") : j;
  if (!rows.is_array() || rows.empty()) throw ConfigError("Gram matrix must be a nonempty array of rows");
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) throw ConfigError("Gram matrix must be square");
    for (Eigen::Index k = 0; k < m; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ConfigError("Gram matrix entries must be numbers");
      g(i, k) = v.get<double>();
    }
  }
  if (!g.allFinite()) throw ConfigError("Gram matrix entries must be finite");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError("Gram matrix must be symmetric");
  return GramMatrix(std::move(g));
}

void write_replications_csv(std::ostream& out, const OutputHeader& header, const RunResult& result) {
  write_header(out, header);
  out << "replication,config_digest,seed,ok,risk,support_size,l1_norm,solver_status,error\n";
  const std::string digest = digest_hex(header.config_digest);
  for (const auto& r : result.records) {
    out << r.index << ',' << digest << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.risk) << ','
        << r.support_size << ',' << format_double(r.l1_norm) << ',' << to_string(r.status) << ',';
    csv_field(out, r.error);
    out << '\n';
  }
}

void write_calibration_csv(std::ostream& out, const OutputHeader& header, const CalibrationResult& result) {
  write_header(out, header);
  out << "gamma,J,n,mean_risk,log2_mean_risk\n";
  for (const auto& row : result.rows)
    out << format_double(row.gamma) << ',' << row.j << ',' << row.n << ',' << format_double(row.mean_risk) << ','
        << format_double(row.log2_mean_risk) << '\n';
}

void write_benchmark_panel_csv(std::ostream& out, const OutputHeader& header, const BenchmarkResult& result,
                               const BenchmarkPanel& panel) {
  write_header(out, header);
  out << "# panel: " << panel.name << '\n';
  out << "density,dictionary,method,replication,seed,ok,risk,support_size,l1_norm\n";
  for (const auto& cell : result.cells) {
    if (cell.method != panel.left && cell.method != panel.right) continue;
    for (const auto& r : cell.records)
      out << to_string(cell.density) << ',' << to_string(cell.dictionary) << ',' << to_string(cell.method) << ','
          << r.index << ',' << r.seed << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.risk) << ','
          << r.support_size << ',' << format_double(r.l1_norm) << '\n';
  }
}

void write_benchmark_summary_csv(std::ostream& out, const OutputHeader& header, const BenchmarkResult& result) {
  write_header(out, header);
  out << "density,dictionary,method,count,failures,mean,min,q1,median,q3,max,whisker_low,whisker_high\n";
  for (const auto& cell : result.cells) {
    const auto& b = cell.risk;
    out << to_string(cell.density) << ',' << to_string(cell.dictionary) << ',' << to_string(cell.method) << ','
        << b.count << ',' << cell.failures;
    for (double v : {b.mean, b.min, b.q1, b.median, b.q3, b.max, b.whisker_low, b.whisker_high})
      out << ',' << format_double(v);
    out << '\n';
  }
}

void write_curve_csv(std::ostream& out, const OutputHeader& header, std::span<const double> xs,
                     std::span<const double> estimate, std::span<const double> density) {
  write_header(out, header);
  out << (density.empty() ? "x,estimate\n" : "x,estimate,density\n");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << format_double(xs[i]) << ',' << format_double(estimate[i]);
    if (!density.empty()) out << ',' << format_double(density[i]);
    out << '\n';
  }
}

}  // namespace sparsedens
