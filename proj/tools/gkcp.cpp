// gkcp: run the Klein cutting-plane method on the minimax-distance benchmark.
//
//   gkcp --d 4 --r 2 --eps 1e-3 --seeds 20                 # seeded runs at one setting
//   gkcp --sweep d --values 2,4,8,16 --out dim.csv        # Table-1 style sweep
//   gkcp --surface --out surface.csv                       # complexity factor grid

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyperklein/complexity.hpp"
#include "hyperklein/errors.hpp"
#include "hyperklein/harness.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw hyperklein::UsageError("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// Writes to `path`, or to stdout when the path is empty.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw hyperklein::UsageError("cannot open '" + path + "' for writing");
  write(file);
}

void print_summary(std::ostream& out, const std::vector<hyperklein::SummaryRow>& rows) {
  out << std::left << std::setw(7) << "sweep" << std::setw(10) << "value" << std::setw(6) << "runs" << std::setw(12)
      << "mean" << std::setw(10) << "std" << std::setw(8) << "max" << std::setw(10) << "theorem_N"
      << "tau\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(7) << r.sweep << std::setw(10) << hyperklein::format_double(r.value) << std::setw(6)
        << r.runs << std::setw(12) << std::fixed << std::setprecision(1) << r.mean_queries << std::setw(10)
        << r.std_queries << std::setw(8) << r.max_queries << std::setw(10) << r.theorem_n << std::setprecision(4)
        << r.tau << '\n';
    out << std::defaultfloat;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein cutting-plane method on hyperbolic balls: benchmark runs, sweeps and complexity surfaces"};

  hyperklein::RunParams params;
  double r = 2.0;
  int seeds = 20;
  std::uint64_t base_seed = 0;
  std::string sweep;
  std::string values;
  std::string out_path;
  std::string summary_path;
  std::string manifest_path;
  std::string convergence_path;
  std::string s_grid = "0.1,0.3,0.5,1,2,4,8";
  std::string eps_grid = "0.1,0.01,0.001,0.0001";
  bool surface = false;
  unsigned jobs = 0;

  app.add_option("--d", params.d, "Dimension d >= 1")->capture_default_str();
  app.add_option("--kappa", params.kappa, "Curvature scale kappa > 0 (sectional curvature -kappa^2)")
      ->capture_default_str();
  app.add_option("--r", r, "Ball radius r; the dimensionless radius is s = kappa r")->capture_default_str();
  app.add_option("--eps", params.eps, "Target accuracy eps in (0, 1)")->capture_default_str();
  app.add_option("--tau", params.tau, "Anchor spread tau (clamped for small radii)")->capture_default_str();
  app.add_option("--fraction", params.fraction, "Target Klein norm as a fraction of tanh s")->capture_default_str();
  app.add_option("--seeds", seeds, "Number of seeded instances per value")->capture_default_str();
  app.add_option("--base-seed", base_seed, "Seed of the first instance")->capture_default_str();
  app.add_option("--sweep", sweep, "Swept parameter")->check(CLI::IsMember({"d", "s", "eps"}));
  app.add_option("--values", values, "Comma-separated values of the swept parameter");
  app.add_option("--out", out_path, "Run CSV (or surface CSV with --surface); stdout if omitted");
  app.add_option("--summary", summary_path, "Summary CSV (mean, std, max per value)");
  app.add_option("--manifest", manifest_path, "Run manifest JSON (defaults to <out>.manifest.json)");
  app.add_option("--convergence", convergence_path, "Median/IQR best-gap curve CSV");
  app.add_flag("--surface", surface, "Emit the complexity surface log_factor(s, eps) instead of running");
  app.add_option("--s-grid", s_grid, "s values for --surface")->capture_default_str();
  app.add_option("--eps-grid", eps_grid, "eps values for --surface")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (surface) {
      emit(out_path, [&](std::ostream& os) {
        hyperklein::emit_complexity_surface(parse_list(s_grid), parse_list(eps_grid), os);
      });
      return 0;
    }

    params.s = params.kappa * r;
    hyperklein::SweepSpec spec;
    spec.fixed = params;
    spec.num_seeds = seeds;
    spec.base_seed = base_seed;
    spec.jobs = jobs;
    if (sweep.empty()) {
      if (!values.empty()) throw hyperklein::UsageError("--values requires --sweep");
      spec.swept = hyperklein::SweepKind::Single;
      spec.values = {params.s};
    } else {
      spec.swept = hyperklein::parse_sweep_kind(sweep);
      spec.values = parse_list(values);
    }

    const hyperklein::SweepReport report = hyperklein::run_sweep(spec);

    std::vector<hyperklein::RunRow> rows;
    for (const auto& run : report.runs) rows.push_back(run.row);
    emit(out_path, [&](std::ostream& os) { hyperklein::write_run_rows(os, rows); });
    if (!summary_path.empty()) {
      emit(summary_path, [&](std::ostream& os) { hyperklein::write_summary(os, report.summary); });
    }
    if (!convergence_path.empty()) {
      emit(convergence_path, [&](std::ostream& os) {
        hyperklein::write_convergence(os, hyperklein::convergence_profile(report.runs));
      });
    }
    if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest.json";
    if (!manifest_path.empty()) {
      const auto manifest = hyperklein::run_manifest(sweep.empty() ? "single" : "sweep", params, base_seed, report.runs);
      emit(manifest_path, [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
    }

    std::ostream& log = out_path.empty() ? std::cerr : std::cout;
    print_summary(log, report.summary);
    int violations = 0;
    for (const auto& run : report.runs) {
      const double eps = run.row.sweep == "eps" ? run.row.value : params.eps;
      if (run.row.queries > run.row.theorem_n || run.row.gap_norm > eps) ++violations;
    }
    for (const auto& line : hyperklein::soft_report(report.summary)) log << line << '\n';
    if (violations > 0) {
      log << violations << " run(s) violated the theorem envelope or the accuracy guarantee\n";
      return 2;
    }
  } catch (const hyperklein::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
