#include "hyperklein/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "hyperklein/complexity.hpp"
#include "hyperklein/errors.hpp"
#include "hyperklein/klein.hpp"

namespace hyperklein {

namespace {

template <typename F>
void parallel_for(std::size_t count, unsigned jobs, F&& body) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw UsageError(std::string("cannot parse ") + what + ": '" + text + "'");
  return value;
}

// Published per-row mean query counts used only by the soft report.
const std::map<std::pair<std::string, double>, double>& reference_means() {
  static const std::map<std::pair<std::string, double>, double> table = {
      {{"d", 2}, 26.0},     {{"d", 4}, 62.8},    {{"d", 8}, 75.0},    {{"d", 16}, 56.7},
      {{"s", 0.1}, 49.9},   {{"s", 0.3}, 54.8},  {{"s", 1}, 64.5},    {{"s", 2}, 62.8},
      {{"s", 4}, 46.0},     {{"s", 8}, 29.9},    {{"eps", 1e-1}, 3.9}, {{"eps", 1e-2}, 10.1},
      {{"eps", 1e-3}, 62.8}, {{"eps", 1e-4}, 121.7},
  };
  return table;
}

double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Single:
      return "single";
    case SweepKind::Dimension:
      return "d";
    case SweepKind::Radius:
      return "s";
    case SweepKind::Accuracy:
      return "eps";
  }
  return "single";
}

SweepKind parse_sweep_kind(const std::string& label) {
  if (label == "d") return SweepKind::Dimension;
  if (label == "s") return SweepKind::Radius;
  if (label == "eps") return SweepKind::Accuracy;
  if (label == "single") return SweepKind::Single;
  throw UsageError("unknown sweep '" + label + "' (expected d, s or eps)");
}

double effective_tau(double s, double tau, double fraction) {
  const double slack = s - std::atanh(fraction * std::tanh(s));
  return std::min(tau, 0.9 * slack);
}

RunOutcome run_single(const RunParams& params) {
  MinimaxParams instance_params{params.d, params.kappa, params.s, effective_tau(params.s, params.tau, params.fraction),
                                params.fraction, params.seed};
  const MinimaxInstance<double> instance = make_minimax_instance<double>(instance_params);

  SolverConfig<double> config;
  config.d = params.d;
  config.kappa = params.kappa;
  config.r = params.r();
  config.eps = params.eps;
  config.lipschitz_m = 1.0;
  config.record_trace = true;

  const auto frame = LorentzFrame<double>::canonical(params.d, params.kappa);
  SolverResult<double> result = [&] {
    try {
      return solve(config, frame, minimax_oracle(instance));
    } catch (const SolverBreakdownError<double>& e) {
      return e.partial();
    }
  }();

  RunOutcome out;
  out.tau = instance_params.tau;
  out.instance = instance_params;
  out.oracle_calls = result.queries_used;
  out.updates = result.updates;

  const double scale = config.lipschitz_m * config.r;
  double best = std::numeric_limits<double>::infinity();
  long threshold_query = 0;
  for (const auto& rec : result.trace) {
    if (!rec.feasible) continue;
    best = std::min(best, (*rec.value - instance.fstar) / scale);
    out.gap_curve.push_back(best);
    if (threshold_query == 0 && best <= params.eps) threshold_query = rec.query_number;
  }
  out.threshold_reached = threshold_query > 0;

  out.row.sweep = to_string(params.sweep);
  out.row.value = params.value;
  out.row.seed = params.seed;
  out.row.queries = out.threshold_reached ? threshold_query : result.queries_used;
  out.row.gap_norm = certify_gap(result, instance.fstar, config);
  out.row.theorem_n = result.theorem_bound;
  out.row.terminated_by = to_string(result.terminated_by);
  return out;
}

RunParams sweep_params(const SweepSpec& spec, double value, int run_index) {
  RunParams p = spec.fixed;
  p.sweep = spec.swept;
  p.value = value;
  p.seed = spec.base_seed + static_cast<std::uint64_t>(run_index);
  switch (spec.swept) {
    case SweepKind::Dimension:
      if (value < 1 || value != std::floor(value)) throw UsageError("dimension sweep values must be positive integers");
      p.d = static_cast<int>(value);
      break;
    case SweepKind::Radius:
      p.s = value;
      break;
    case SweepKind::Accuracy:
      p.eps = value;
      break;
    case SweepKind::Single:
      break;
  }
  return p;
}

SweepReport run_sweep(const SweepSpec& spec) {
  if (spec.values.empty()) throw UsageError("sweep needs at least one value");
  if (spec.num_seeds < 1) throw UsageError("sweep needs at least one seed");

  std::vector<RunParams> jobs;
  for (double value : spec.values) {
    for (int i = 0; i < spec.num_seeds; ++i) jobs.push_back(sweep_params(spec, value, i));
  }

  SweepReport report;
  report.runs.resize(jobs.size());
  parallel_for(jobs.size(), spec.jobs, [&](std::size_t i) { report.runs[i] = run_single(jobs[i]); });
  std::stable_sort(report.runs.begin(), report.runs.end(), [](const RunOutcome& a, const RunOutcome& b) {
    return std::tie(a.row.value, a.row.seed) < std::tie(b.row.value, b.row.seed);
  });
  report.summary = summarize(report.runs);
  return report;
}

std::vector<SummaryRow> summarize(const std::vector<RunOutcome>& runs) {
  std::vector<SummaryRow> out;
  std::size_t i = 0;
  while (i < runs.size()) {
    std::size_t j = i;
    while (j < runs.size() && runs[j].row.value == runs[i].row.value && runs[j].row.sweep == runs[i].row.sweep) ++j;

    SummaryRow row;
    row.sweep = runs[i].row.sweep;
    row.value = runs[i].row.value;
    row.runs = static_cast<int>(j - i);
    row.theorem_n = runs[i].row.theorem_n;
    row.tau = runs[i].tau;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      sum += static_cast<double>(runs[k].row.queries);
      row.max_queries = std::max(row.max_queries, runs[k].row.queries);
    }
    row.mean_queries = sum / row.runs;
    double sq = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      const double dev = static_cast<double>(runs[k].row.queries) - row.mean_queries;
      sq += dev * dev;
    }
    row.std_queries = row.runs > 1 ? std::sqrt(sq / (row.runs - 1)) : 0.0;
    out.push_back(row);
    i = j;
  }
  return out;
}

std::vector<ConvergencePoint> convergence_profile(const std::vector<RunOutcome>& runs) {
  std::size_t longest = 0;
  for (const auto& run : runs) longest = std::max(longest, run.gap_curve.size());
  std::vector<ConvergencePoint> out;
  for (std::size_t q = 0; q < longest; ++q) {
    std::vector<double> column;
    for (const auto& run : runs) {
      if (run.gap_curve.empty()) continue;
      column.push_back(run.gap_curve[std::min(q, run.gap_curve.size() - 1)]);
    }
    if (column.empty()) continue;
    out.push_back(ConvergencePoint{static_cast<long>(q + 1), quantile(column, 0.5), quantile(column, 0.25),
                                   quantile(column, 0.75)});
  }
  return out;
}

std::vector<std::string> soft_report(const std::vector<SummaryRow>& summary) {
  std::vector<std::string> lines;
  for (const auto& row : summary) {
    const auto it = reference_means().find({row.sweep, row.value});
    if (it == reference_means().end()) continue;
    const double ref = it->second;
    if (row.mean_queries < 0.25 * ref || row.mean_queries > 1.75 * ref) {
      lines.push_back("review: sweep " + row.sweep + "=" + format_double(row.value) + " mean " +
                      format_double(row.mean_queries) + " is outside +-75% of the reference mean " +
                      format_double(ref));
    }
  }
  return lines;
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc()) throw Error("cannot format double");
  return std::string(buffer, ptr);
}

void write_run_rows(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kRunCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep << ',' << format_double(r.value) << ',' << r.seed << ',' << r.queries << ','
        << format_double(r.gap_norm) << ',' << r.theorem_n << ',' << r.terminated_by << '\n';
  }
}

std::vector<RunRow> parse_run_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) throw UsageError("run CSV has an unexpected header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw UsageError("run CSV row has " + std::to_string(f.size()) + " fields: " + line);
    RunRow r;
    r.sweep = f[0];
    r.value = parse_number<double>(f[1], "value");
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.queries = parse_number<long>(f[3], "queries");
    r.gap_norm = parse_number<double>(f[4], "gap_norm");
    r.theorem_n = parse_number<int>(f[5], "theorem_n");
    r.terminated_by = f[6];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "sweep,value,runs,mean_queries,std_queries,max_queries,theorem_n,tau\n";
  for (const auto& r : rows) {
    out << r.sweep << ',' << format_double(r.value) << ',' << r.runs << ',' << format_double(r.mean_queries) << ','
        << format_double(r.std_queries) << ',' << r.max_queries << ',' << r.theorem_n << ',' << format_double(r.tau)
        << '\n';
  }
}

void write_convergence(std::ostream& out, const std::vector<ConvergencePoint>& points) {
  out << "query,median_gap,q25_gap,q75_gap\n";
  for (const auto& p : points) {
    out << p.query << ',' << format_double(p.median) << ',' << format_double(p.q25) << ',' << format_double(p.q75)
        << '\n';
  }
}

void emit_complexity_surface(const std::vector<double>& s_grid, const std::vector<double>& eps_grid,
                             std::ostream& out) {
  if (s_grid.empty() || eps_grid.empty()) throw UsageError("complexity surface needs nonempty s and eps grids");
  out << "s,eps,log_factor,large_s_expansion\n";
  for (double s : s_grid) {
    for (double eps : eps_grid) {
      out << format_double(s) << ',' << format_double(eps) << ',' << format_double(log_factor(s, eps)) << ','
          << format_double(large_s_expansion(s, eps)) << '\n';
    }
  }
}

nlohmann::json to_json(const MinimaxParams& p) {
  return {{"d", p.d}, {"kappa", p.kappa}, {"s", p.s}, {"tau", p.tau}, {"fraction", p.fraction}, {"seed", p.seed}};
}

MinimaxParams minimax_params_from_json(const nlohmann::json& j) {
  MinimaxParams p;
  p.d = j.at("d").get<int>();
  p.kappa = j.at("kappa").get<double>();
  p.s = j.at("s").get<double>();
  p.tau = j.at("tau").get<double>();
  p.fraction = j.at("fraction").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

nlohmann::json run_manifest(const std::string& mode, const RunParams& base, std::uint64_t base_seed,
                            const std::vector<RunOutcome>& runs) {
  nlohmann::json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["mode"] = mode;
  manifest["inputs"] = {{"d", base.d},     {"kappa", base.kappa}, {"r", base.r()},
                        {"eps", base.eps}, {"tau", base.tau},     {"fraction", base.fraction},
                        {"base_seed", base_seed}};
  manifest["seed_rule"] = "seed = base_seed + run index within each swept value";

  // Derived constants, one entry per distinct (d, s, eps) combination.
  nlohmann::json derived = nlohmann::json::array();
  std::vector<std::tuple<int, double, double>> seen;
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& run : runs) {
    const auto& p = run.instance;
    const double eps = run.row.sweep == "eps" ? run.row.value : base.eps;
    const auto key = std::make_tuple(p.d, p.s, eps);
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      seen.push_back(key);
      const double r = p.s / p.kappa;
      derived.push_back({{"d", p.d},
                         {"s", p.s},
                         {"eps", eps},
                         {"R_s", klein_radius(p.s)},
                         {"L_s", pullback_lipschitz(1.0, p.kappa, p.s)},
                         {"eta", eps * 1.0 * r},
                         {"N", query_bound(ComplexityInputs{p.d, p.s, eps})},
                         {"tau", p.tau}});
    }
    seeds.push_back(p.seed);
    nlohmann::json inst = to_json(p);
    inst["sweep"] = run.row.sweep;
    inst["value"] = run.row.value;
    instances.push_back(std::move(inst));
  }
  manifest["derived"] = std::move(derived);
  manifest["seeds"] = std::move(seeds);
  manifest["instances"] = std::move(instances);
  return manifest;
}

}  // namespace hyperklein
