// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hyperklein/complexity.hpp"
#include "hyperklein/cuts.hpp"
#include "hyperklein/harness.hpp"
#include "hyperklein/klein.hpp"
#include "hyperklein/localizers.hpp"
#include "hyperklein/lorentz.hpp"
#include "hyperklein/oracles.hpp"
#include "hyperklein/solver.hpp"
#include "test_support.hpp"

namespace hk = hyperklein;
namespace ht = hyperklein::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (ok) detail << why;
    ok = false;
  }
};

hk::LorentzFrame<double> random_frame(Eigen::Index d, ht::Rng& rng, double spread, double kappa = 1.0) {
  const auto x0 = ht::random_point(d, rng, spread, kappa);
  std::vector<hk::LorentzVector<double>> seeds;
  for (Eigen::Index i = 0; i < d; ++i) seeds.push_back(ht::gaussian_vector(d + 1, rng));
  return hk::build_frame(x0, std::optional(seeds));
}

void theorem_table(Outcome& out) {
  struct Row {
    int d;
    double s;
    double eps;
    int n;
  };
  const Row rows[] = {{2, 2, 1e-3, 140},   {4, 2, 1e-3, 465},   {8, 2, 1e-3, 1671},  {16, 2, 1e-3, 6311},
                      {4, 0.1, 1e-3, 388}, {4, 0.3, 1e-3, 390}, {4, 1, 1e-3, 412},   {4, 2, 1e-3, 465},
                      {4, 4, 1e-3, 597},   {4, 8, 1e-3, 889},   {4, 2, 1e-1, 280},   {4, 2, 1e-2, 372},
                      {4, 2, 1e-3, 465},   {4, 2, 1e-4, 557}};
  int matched = 0;
  for (const auto& r : rows) {
    const int n = hk::query_bound({r.d, r.s, r.eps});
    if (n == r.n) {
      ++matched;
    } else {
      std::ostringstream why;
      why << "d=" << r.d << " s=" << r.s << " eps=" << r.eps << " gave " << n << " expected " << r.n;
      out.fail(why.str());
    }
  }
  if (out.ok) out.detail << matched << "/14 exact";
}

void guarantee_suite(Outcome& out) {
  long runs = 0;
  long worst_margin = 1L << 40;
  double worst_gap_ratio = 0.0;
  double reference_mean = 0.0;
  for (int d : {1, 2, 4, 8}) {
    for (double s : {0.5, 2.0, 8.0}) {
      for (double eps : {1e-2, 1e-3}) {
        hk::SweepSpec spec;
        spec.swept = hk::SweepKind::Accuracy;
        spec.values = {eps};
        spec.fixed.d = d;
        spec.fixed.s = s;
        spec.num_seeds = 10;
        const auto report = hk::run_sweep(spec);
        for (const auto& run : report.runs) {
          ++runs;
          worst_margin = std::min<long>(worst_margin, run.row.theorem_n - run.row.queries);
          worst_gap_ratio = std::max(worst_gap_ratio, run.row.gap_norm / eps);
          if (run.row.gap_norm > eps || run.row.queries > run.row.theorem_n || !run.threshold_reached) {
            std::ostringstream why;
            why << "d=" << d << " s=" << s << " eps=" << eps << " seed=" << run.row.seed << ": gap "
                << run.row.gap_norm << ", queries " << run.row.queries << " of N=" << run.row.theorem_n << " ("
                << run.row.terminated_by << ")";
            out.fail(why.str());
          }
        }
        if (d == 4 && s == 2.0 && eps == 1e-3) reference_mean = report.summary.at(0).mean_queries;
      }
    }
  }
  if (out.ok) {
    out.detail << runs << " runs, max gap/eps " << worst_gap_ratio << ", min N - queries " << worst_margin;
  }
  const bool in_ballpark = reference_mean >= 16 && reference_mean <= 110;
  out.detail << "; soft: d=4 s=2 eps=1e-3 mean " << reference_mean << (in_ballpark ? " in" : " OUTSIDE")
             << " [16, 110]";
}

void lorentz_linearization(Outcome& out) {
  ht::Rng rng(1001);
  double worst = 0.0;
  int compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::Index d = 1 + trial % 6;
    const double kappa = 0.5 + 0.5 * (trial % 4);
    const auto frame = random_frame(d, rng, 1.5, kappa);
    const auto x = hk::from_klein(frame, hk::KleinPoint<double>(ht::random_in_ball(d, rng, std::tanh(3.0))));
    const auto y = hk::from_klein(frame, hk::KleinPoint<double>(ht::random_in_ball(d, rng, std::tanh(3.0))));
    const auto g = ht::random_tangent(x, rng, 2.0);

    const double riemannian = hk::riemannian_inner(g, hk::log_map(x, y));
    const double linearized = hk::lorentz_pairing(g, y);
    const double rel = std::abs(riemannian - linearized) / std::max(std::abs(riemannian), 1e-300);
    if (std::abs(riemannian) > 1e-12) worst = std::max(worst, rel);
    if (std::abs(riemannian) > 1e-12 && rel > 1e-9) {
      out.fail("relative error " + std::to_string(rel) + " at trial " + std::to_string(trial));
    }

    const hk::Vector<double> a = frame.pairings(g.coords()).tail(d);
    const double euclidean = a.dot(hk::to_klein(frame, y) - hk::to_klein(frame, x));
    if (std::abs(riemannian) > 1e-12) {
      ++compared;
      if (std::signbit(euclidean) != std::signbit(riemannian)) {
        out.fail("sign disagreement at trial " + std::to_string(trial));
      }
    }
  }
  if (out.ok) out.detail << "max rel err " << worst << ", " << compared << " signs agree";
}

void ellipsoid_calculus(Outcome& out) {
  ht::Rng rng(1002);
  double worst_det = 0.0;
  long contained = 0;
  for (int d = 2; d <= 16; ++d) {
    const double n = d;
    const double expected_log = n * std::log(n * n / (n * n - 1)) + std::log((n - 1) / (n + 1));
    hk::Ellipsoid<double> e = hk::Ellipsoid<double>::ball(d, 1.0);
    for (int step = 0; step < 10; ++step) {
      const hk::Vector<double> a = ht::unit_vector(d, rng);
      const hk::Cut<double> cut{a, e.center, hk::CutKind::Subgradient};
      const auto next = hk::ellipsoid_update(e, cut);

      const double ratio = std::exp(next.log_det() - e.log_det());
      const double rel = std::abs(ratio - std::exp(expected_log)) / std::exp(expected_log);
      worst_det = std::max(worst_det, rel);
      if (rel > 1e-10) out.fail("det ratio rel err " + std::to_string(rel) + " at d=" + std::to_string(d));

      if (step == 9) {
        Eigen::LLT<hk::Matrix<double>> llt(e.shape);
        int sampled = 0;
        while (sampled < 1000) {
          const hk::Vector<double> u = e.center + llt.matrixL() * ht::random_in_ball(d, rng, 1.0);
          if (cut.offset(u) > 0) continue;
          ++sampled;
          if (hk::contains(next, u)) {
            ++contained;
          } else {
            out.fail("kept half not contained at d=" + std::to_string(d));
          }
        }
      }
      e = next;
    }
    const double volume_ratio = hk::ellipsoid_volume_ratio(d);
    if (std::abs(volume_ratio - std::exp(expected_log / 2)) > 1e-12 * volume_ratio) {
      out.fail("volume ratio formula disagrees with det ratio at d=" + std::to_string(d));
    }
    if (!(volume_ratio <= std::exp(-1.0 / (2 * (n + 1))))) {
      out.fail("volume ratio above exp(-1/(2(d+1))) at d=" + std::to_string(d));
    }
  }
  if (out.ok) out.detail << "max det rel err " << worst_det << ", " << contained << " sampled points contained";
}

void minimizer_containment(Outcome& out) {
  long bodies = 0;
  const int dims[] = {1, 2, 4, 8};
  for (int run = 0; run < 20; ++run) {
    hk::MinimaxParams p;
    p.d = dims[run % 4];
    p.seed = static_cast<std::uint64_t>(run);
    const auto inst = hk::make_minimax_instance(p);
    const auto chart = hk::LorentzFrame<double>::canonical(p.d);
    const hk::Vector<double> star = hk::to_klein(chart, inst.target);

    hk::SolverConfig<double> cfg;
    cfg.d = p.d;
    cfg.r = p.s;
    cfg.eps = 1e-3;
    cfg.record_trace = true;
    hk::SolverHooks<double> hooks;
    hooks.on_localizer = [&](long step, const hk::Localizer<double>& body) {
      ++bodies;
      const bool inside = std::visit(
          [&](const auto& b) {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, hk::Ellipsoid<double>>) {
              return hk::contains(b, star, 1e-9);
            } else {
              return hk::contains(b, star(0), 1e-9);
            }
          },
          body);
      if (!inside) {
        out.fail("d=" + std::to_string(p.d) + " seed=" + std::to_string(run) + " lost X* at step " +
                 std::to_string(step));
      }
    };
    hk::solve(cfg, chart, hk::minimax_oracle(inst), hooks);
  }
  if (out.ok) out.detail << "20 runs, " << bodies << " bodies checked";
}

void chord_collinearity(Outcome& out) {
  ht::Rng rng(1003);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index d = 2 + trial % 5;
    const auto frame = random_frame(d, rng, 1.0, trial % 2 == 0 ? 1.0 : 2.0);
    const auto x = hk::from_klein(frame, hk::KleinPoint<double>(ht::random_in_ball(d, rng, std::tanh(3.0))));
    const auto y = hk::from_klein(frame, hk::KleinPoint<double>(ht::random_in_ball(d, rng, std::tanh(3.0))));
    const auto z = hk::exp_map(x, hk::TangentVector<double>(x, t(rng) * hk::log_map(x, y).coords()));
    const hk::Vector<double> a = hk::to_klein(frame, y) - hk::to_klein(frame, x);
    const hk::Vector<double> b = hk::to_klein(frame, z) - hk::to_klein(frame, x);
    if (a.norm() == 0.0 || b.norm() == 0.0) continue;
    // |a ^ b| / (|a| |b|), with the wedge norm taken as |a| |b - (b.a) a / |a|^2|.
    const hk::Vector<double> across = b - (b.dot(a) / a.squaredNorm()) * a;
    const double scaled = across.norm() / b.norm();
    worst = std::max(worst, scaled);
    if (scaled > 1e-9) out.fail("scaled cross product " + std::to_string(scaled) + " at trial " + std::to_string(trial));
  }
  if (out.ok) out.detail << "max scaled cross product " << worst;
}

void metric_distortion(Outcome& out) {
  ht::Rng rng(1004);
  double worst_fd = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 1 + trial % 5;
    const double kappa = trial % 3 == 0 ? 1.0 : 0.6 + trial % 3;
    const auto frame = random_frame(d, rng, 1.0, kappa);
    const hk::Vector<double> u = ht::random_in_ball(d, rng, std::tanh(2.5));
    const hk::Vector<double> h = ht::unit_vector(d, rng);
    const double step = 1e-6;
    const auto xm = hk::from_klein(frame, hk::KleinPoint<double>(u - step * h));
    const auto xp = hk::from_klein(frame, hk::KleinPoint<double>(u + step * h));
    const double fd = hk::distance(xm, xp) / (2 * step);
    const double exact = hk::klein_metric_norm(hk::KleinPoint<double>(u), h, kappa);
    const double rel = std::abs(fd - exact) / exact;
    worst_fd = std::max(worst_fd, rel);
    if (rel > 1e-4) out.fail("finite-difference rel err " + std::to_string(rel) + " at trial " + std::to_string(trial));
  }

  double worst_sup = 0.0;
  for (double s : {0.3, 1.0, 2.0, 4.0}) {
    for (double kappa : {1.0, 2.5}) {
      const int d = 3;
      const double radius = hk::klein_radius(s);
      double sup = 0.0;
      for (int k = 0; k < 200; ++k) {
        const hk::Vector<double> u = radius * ht::unit_vector(d, rng);
        // Pullback metric tensor G(u); the operator norm of DX(u) is sqrt(lambda_max(G)).
        const double gap = hk::detail::one_minus_norm2(u);
        const hk::Matrix<double> g = (hk::Matrix<double>::Identity(d, d) / gap + u * u.transpose() / (gap * gap)) /
                                     (kappa * kappa);
        Eigen::SelfAdjointEigenSolver<hk::Matrix<double>> eig(g, Eigen::EigenvaluesOnly);
        sup = std::max(sup, std::sqrt(eig.eigenvalues().maxCoeff()));
      }
      const double ls = hk::pullback_lipschitz(1.0, kappa, s);
      const double rel = std::abs(sup - ls) / ls;
      worst_sup = std::max(worst_sup, rel);
      if (rel > 1e-6) out.fail("L_s rel err " + std::to_string(rel) + " at s=" + std::to_string(s));
    }
  }
  if (out.ok) out.detail << "max FD rel err " << worst_fd << ", max L_s rel err " << worst_sup;
}

void expansions(Outcome& out) {
  for (double s : {1.0, 2.0, 4.0, 8.0}) {
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      if (!(std::abs(hk::log_factor(s, eps) - hk::large_s_expansion(s, eps)) <= 2 * std::exp(-4 * s))) {
        out.fail("large-s remainder too big at s=" + std::to_string(s));
      }
    }
  }
  for (double s : {0.05, 0.1, 0.3, 0.5}) {
    if (!(std::abs(hk::sinh_cosh_ratio(s) - hk::small_s_expansion(s)) <= 0.02 * std::pow(s, 6))) {
      out.fail("small-s remainder too big at s=" + std::to_string(s));
    }
  }
  int compared = 0;
  for (int d : {1, 2, 4, 16}) {
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      ++compared;
      const int a = hk::query_bound({d, 1e-9, eps});
      const int b = hk::euclidean_limit_bound(d, eps);
      if (a != b) out.fail("Euclidean limit mismatch at d=" + std::to_string(d) + ": " + std::to_string(a) + " vs " +
                           std::to_string(b));
    }
  }
  if (out.ok) out.detail << "12 large-s, 4 small-s, " << compared << " Euclidean-limit checks";
}

void interval_branch(Outcome& out) {
  ht::Rng rng(1005);
  const double s = 1.0;
  const double eps = 1e-2;
  const auto frame = hk::LorentzFrame<double>::canonical(1);
  hk::SolverConfig<double> cfg;
  cfg.d = 1;
  cfg.r = s;
  cfg.eps = eps;
  cfg.record_trace = true;
  const double eta = cfg.target_gap();
  const long bound = 1 + static_cast<long>(std::ceil(std::log2(cfg.pullback_lipschitz() * cfg.klein_radius() / eta)));
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  long worst = 0;
  for (int t = 0; t < 10; ++t) {
    hk::KleinPoint<double> u(1);
    u(0) = pick(rng) * cfg.klein_radius();
    const auto target = hk::from_klein(frame, u);
    const auto result = hk::solve(cfg, frame, hk::distance_oracle(target));
    long hit = -1;
    double best = INFINITY;
    for (const auto& rec : result.trace) {
      best = std::min(best, *rec.value);
      if (best <= eta) {
        hit = rec.query_number;
        break;
      }
    }
    if (hit < 0 || hit > bound) {
      out.fail("target " + std::to_string(u(0)) + " reached eta after " + std::to_string(hit) + " queries, bound " +
               std::to_string(bound));
    }
    worst = std::max(worst, hit);
  }
  if (out.ok) out.detail << "10 targets, worst " << worst << " of " << bound << " queries";
}

struct Criterion {
  int id;
  const char* name;
  double max_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "theorem-bound table", 1.0, theorem_table},
      {2, "guarantee suite", 60.0, guarantee_suite},
      {3, "Lorentz linearization identity", 1.0, lorentz_linearization},
      {4, "ellipsoid calculus", 5.0, ellipsoid_calculus},
      {5, "minimizer containment", 0.0, minimizer_containment},
      {6, "chord collinearity", 0.0, chord_collinearity},
      {7, "metric distortion", 0.0, metric_distortion},
      {8, "expansions", 0.0, expansions},
      {9, "interval branch", 0.0, interval_branch},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0 && seconds > c.max_seconds) {
      out.ok = false;
      out.detail << "; runtime " << seconds << " s exceeds " << c.max_seconds << " s";
    }
    if (!out.ok) ++failures;
    std::printf("[%s] %d %s (%.2f s): %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, seconds,
                out.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
