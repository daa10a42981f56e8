#pragma once

#include "sparsedens/analysis.hpp"
#include "sparsedens/empirical.hpp"
#include "sparsedens/experiments.hpp"
#include "sparsedens/gram.hpp"
#include "sparsedens/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace sparsedens {

std::string_view version();

/// Provenance written at the top of every output file.
struct OutputHeader {
  std::string command;
  std::uint64_t config_digest = 0;
};

std::string digest_hex(std::uint64_t digest);

/// "# sparsedens <version>", "# command: ...", "# config_digest: ..." lines.
void write_header(std::ostream& out, const OutputHeader& header);
/// {"tool": ..., "version": ..., "command": ..., "config_digest": ...}
nlohmann::json header_json(const OutputHeader& header);

/// Shortest round-trip decimal form; nan and inf are spelled out.
std::string format_double(double value);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const EmpiricalStats& stats);
nlohmann::json to_json(const SolverReport& report);
nlohmann::json to_json(const CoefficientVector& c);
nlohmann::json to_json(const BoxplotStats& b);
nlohmann::json to_json(const RunResult& result);
nlohmann::json to_json(const AssumptionCheck& check);
nlohmann::json to_json(const StructuralReport& report);
nlohmann::json to_json(const GramSummary& summary);

/// Reads {"gram": [[...], ...]} or a bare nested array. Throws ConfigError
/// when the matrix is not square, not finite, or not symmetric within 1e-12.
GramMatrix gram_from_json(const nlohmann::json& j);

/// replication,config_digest,seed,ok,risk,support_size,l1_norm,solver_status,error
void write_replications_csv(std::ostream& out, const OutputHeader& header, const RunResult& result);
/// gamma,J,n,mean_risk,log2_mean_risk
void write_calibration_csv(std::ostream& out, const OutputHeader& header, const CalibrationResult& result);
/// density,dictionary,method,replication,seed,ok,risk,support_size,l1_norm for the two methods of a panel
void write_benchmark_panel_csv(std::ostream& out, const OutputHeader& header, const BenchmarkResult& result,
                               const BenchmarkPanel& panel);
/// density,dictionary,method,count,failures,mean,min,q1,median,q3,max,whisker_low,whisker_high
void write_benchmark_summary_csv(std::ostream& out, const OutputHeader& header, const BenchmarkResult& result);
/// x,estimate[,density] on the given grid
void write_curve_csv(std::ostream& out, const OutputHeader& header, std::span<const double> xs,
                     std::span<const double> estimate, std::span<const double> density = {});

}  // namespace sparsedens
