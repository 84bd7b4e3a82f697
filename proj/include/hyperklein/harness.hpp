#pragma once

// Experiment harness for the minimax-distance benchmark: seeded single runs,
// parameter sweeps with summary statistics, CSV emission and run manifests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperklein/oracles.hpp"
#include "hyperklein/solver.hpp"

namespace hyperklein {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class SweepKind { Single, Dimension, Radius, Accuracy };

/// "single", "d", "s" or "eps".
std::string to_string(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& label);

struct RunParams {
  int d = 4;
  double kappa = 1.0;
  double s = 2.0;
  double eps = 1e-3;
  double tau = 0.8;
  double fraction = 0.55;
  std::uint64_t seed = 0;
  SweepKind sweep = SweepKind::Single;
  double value = 0.0;  // swept value this run belongs to; unused for single runs

  double r() const { return s / kappa; }
};

/// One line of the run CSV.
struct RunRow {
  std::string sweep;
  double value = 0.0;
  std::uint64_t seed = 0;
  long queries = 0;  // oracle calls until the best normalized gap first reached eps
  double gap_norm = 0.0;
  int theorem_n = 0;
  std::string terminated_by;

  bool operator==(const RunRow&) const = default;
};

struct RunOutcome {
  RunRow row;
  double tau = 0.0;  // spread actually used (see effective_tau)
  long oracle_calls = 0;
  long updates = 0;
  bool threshold_reached = false;
  std::vector<double> gap_curve;  // best normalized gap after each oracle call
  MinimaxParams instance;
};

/// Largest admissible spread: min(tau, 0.9 (s - artanh(fraction tanh s))).
/// Keeps every anchor strictly inside the feasible ball for small radii.
double effective_tau(double s, double tau, double fraction);

RunOutcome run_single(const RunParams& params);

struct SweepSpec {
  SweepKind swept = SweepKind::Dimension;
  std::vector<double> values;
  RunParams fixed;
  int num_seeds = 20;
  std::uint64_t base_seed = 0;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct SummaryRow {
  std::string sweep;
  double value = 0.0;
  int runs = 0;
  double mean_queries = 0.0;
  double std_queries = 0.0;  // sample standard deviation
  long max_queries = 0;
  int theorem_n = 0;
  double tau = 0.0;
};

struct SweepReport {
  std::vector<RunOutcome> runs;  // sorted by (value, seed)
  std::vector<SummaryRow> summary;
};

/// RunParams for run index i of a sweep at one swept value; seed = base_seed + i.
RunParams sweep_params(const SweepSpec& spec, double value, int run_index);

SweepReport run_sweep(const SweepSpec& spec);

std::vector<SummaryRow> summarize(const std::vector<RunOutcome>& runs);

/// Median and interquartile band of the best-gap curves, one row per query count.
struct ConvergencePoint {
  long query = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};
std::vector<ConvergencePoint> convergence_profile(const std::vector<RunOutcome>& runs);

/// Lines flagging sweep means outside +-75% of the published reference means.
std::vector<std::string> soft_report(const std::vector<SummaryRow>& summary);

// CSV ---------------------------------------------------------------------

inline constexpr const char* kRunCsvHeader = "sweep,value,seed,queries,gap_norm,theorem_n,terminated_by";

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

void write_run_rows(std::ostream& out, const std::vector<RunRow>& rows);
std::vector<RunRow> parse_run_rows(std::istream& in);

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_convergence(std::ostream& out, const std::vector<ConvergencePoint>& points);

/// CSV with header s,eps,log_factor,large_s_expansion over the grid product.
void emit_complexity_surface(const std::vector<double>& s_grid, const std::vector<double>& eps_grid,
                             std::ostream& out);

// Manifest ----------------------------------------------------------------

nlohmann::json to_json(const MinimaxParams& params);
MinimaxParams minimax_params_from_json(const nlohmann::json& j);

/// Inputs, derived constants (s, R_s, L_s, eta, N), seeds and instance
/// parameters of every run.
nlohmann::json run_manifest(const std::string& mode, const RunParams& base, std::uint64_t base_seed,
                            const std::vector<RunOutcome>& runs);

}  // namespace hyperklein
