#pragma once

// Global Klein cutting-plane method for a Lipschitz geodesically convex
// function on a closed hyperbolic ball B(x0, r).
//
// The whole ball is charted once in Klein coordinates about x0, where it
// becomes the Euclidean ball of radius R_s = tanh(kappa r). Each step either
// cuts off an infeasible ellipsoid center with its feasibility normal or lifts
// the center to the hyperboloid, queries the oracle and turns the Riemannian
// subgradient into an exact central cut. The loop runs for the closed-form
// budget N(d, s, eps) of localizer updates.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyperklein/complexity.hpp"
#include "hyperklein/cuts.hpp"
#include "hyperklein/errors.hpp"
#include "hyperklein/klein.hpp"
#include "hyperklein/localizers.hpp"
#include "hyperklein/lorentz.hpp"

namespace hyperklein {

template <typename Scalar>
struct OracleAnswer {
  Scalar value;
  TangentVector<Scalar> subgradient;
};

/// Returns f(X) and some g in the Riemannian subdifferential at X, tangent at X.
template <typename Scalar>
using FirstOrderOracle = std::function<OracleAnswer<Scalar>(const HyperboloidPoint<Scalar>&)>;

template <typename Scalar>
struct SolverConfig {
  int d = 2;
  Scalar kappa = Scalar(1);
  Scalar r = Scalar(1);
  Scalar eps = Scalar(1e-3);
  Scalar lipschitz_m = Scalar(1);
  std::optional<long> max_queries_override;
  bool record_trace = false;

  Scalar s() const { return kappa * r; }
  Scalar klein_radius() const { return hyperklein::klein_radius(s()); }
  /// eta = eps M r, the accuracy guaranteed for the best recorded value.
  Scalar target_gap() const { return eps * lipschitz_m * r; }
  Scalar pullback_lipschitz() const { return hyperklein::pullback_lipschitz(lipschitz_m, kappa, s()); }
  int theorem_bound() const {
    return query_bound(ComplexityInputs{d, static_cast<double>(s()), static_cast<double>(eps)});
  }

  void validate() const {
    if (d < 1) throw UsageError("solver: d must be at least 1");
    if (!(kappa > Scalar(0)) || !(r > Scalar(0)) || !(lipschitz_m > Scalar(0))) {
      throw UsageError("solver: kappa, r and M must be positive");
    }
    if (!(eps > Scalar(0) && eps < Scalar(1))) throw UsageError("solver: eps must lie in (0, 1)");
    if (max_queries_override && *max_queries_override < 1) throw UsageError("solver: query override must be >= 1");
  }
};

enum class Termination { Budget, ZeroSubgradient, Breakdown };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Budget:
      return "budget";
    case Termination::ZeroSubgradient:
      return "zero_subgradient";
    case Termination::Breakdown:
      return "breakdown";
  }
  return "unknown";
}

template <typename Scalar>
struct QueryRecord {
  long index = 0;                     // localizer step k
  long query_number = 0;              // 1-based oracle call count, 0 for infeasible steps
  Vector<Scalar> klein_center;        // c_k, possibly outside the feasible ball
  bool feasible = false;
  std::optional<Scalar> value;        // present iff feasible
  std::optional<CutKind> cut_kind;    // absent when the step ended in an optimality certificate
  Scalar localizer_size = Scalar(0);  // log det Q_{k+1}, or the interval length for d = 1
};

template <typename Scalar>
struct SolverResult {
  HyperboloidPoint<Scalar> best_point;
  Scalar best_value;
  long queries_used = 0;
  long updates = 0;
  int theorem_bound = 0;
  Termination terminated_by = Termination::Budget;
  std::vector<QueryRecord<Scalar>> trace;
};

template <typename Scalar>
using Localizer = std::variant<Ellipsoid<Scalar>, IntervalState<Scalar>>;

/// Optional instrumentation. `on_localizer` sees the initial body (step 0)
/// and the body after every update (step k + 1).
template <typename Scalar>
struct SolverHooks {
  std::function<void(long, const Localizer<Scalar>&)> on_localizer;
};

/// Raised when the ellipsoid loses definiteness; carries everything recorded so far.
template <typename Scalar>
class SolverBreakdownError : public BreakdownError {
 public:
  SolverBreakdownError(const BreakdownError& cause, SolverResult<Scalar> partial)
      : BreakdownError(cause), partial_(std::move(partial)) {}

  const SolverResult<Scalar>& partial() const noexcept { return partial_; }

 private:
  SolverResult<Scalar> partial_;
};

namespace detail {

template <typename Scalar>
class SolverRun {
 public:
  SolverRun(const SolverConfig<Scalar>& config, const LorentzFrame<Scalar>& frame,
            const FirstOrderOracle<Scalar>& oracle, const SolverHooks<Scalar>& hooks)
      : config_(config), frame_(frame), oracle_(oracle), hooks_(hooks) {}

  SolverResult<Scalar> run() {
    config_.validate();
    if (frame_.dim() != config_.d) throw UsageError("solver: frame dimension differs from config.d");
    if (frame_.kappa() != config_.kappa) throw UsageError("solver: frame curvature differs from config.kappa");
    if (!oracle_) throw UsageError("solver: no oracle supplied");

    theorem_bound_ = config_.theorem_bound();
    budget_ = config_.max_queries_override.value_or(theorem_bound_);
    radius_ = config_.klein_radius();
    return config_.d == 1 ? run_interval() : run_ellipsoid();
  }

 private:
  struct Query {
    HyperboloidPoint<Scalar> point;
    CutOrCertificate<Scalar> outcome;
  };

  Query query(const Vector<Scalar>& center) {
    HyperboloidPoint<Scalar> x = from_klein(frame_, center);
    OracleAnswer<Scalar> answer = oracle_(x);
    ++queries_;
    const auto& g = answer.subgradient;
    if (!std::isfinite(static_cast<double>(answer.value))) throw ContractViolation("oracle returned a non-finite value");
    const auto& base = g.base().coords();
    if (base.size() != x.coords().size() ||
        (base - x.coords()).cwiseAbs().maxCoeff() > Scalar(1e-9) * (Scalar(1) + lorentz_sup_norm(x.coords()))) {
      throw ContractViolation("oracle subgradient is not based at the queried point");
    }
    CutOrCertificate<Scalar> outcome = [&] {
      try {
        return subgradient_cut(frame_, x, g);
      } catch (const UsageError& e) {
        throw ContractViolation(std::string("oracle subgradient rejected: ") + e.what());
      }
    }();
    if (!best_ || answer.value < best_->value) best_ = Best{x, answer.value};
    last_value_ = answer.value;
    return Query{std::move(x), std::move(outcome)};
  }

  void record(long k, const Vector<Scalar>& center, bool feasible, std::optional<CutKind> kind, Scalar size) {
    if (!config_.record_trace) return;
    QueryRecord<Scalar> rec;
    rec.index = k;
    rec.query_number = feasible ? queries_ : 0;
    rec.klein_center = center;
    rec.feasible = feasible;
    if (feasible) rec.value = last_value_;
    rec.cut_kind = kind;
    rec.localizer_size = size;
    trace_.push_back(std::move(rec));
  }

  void notify(long step, const Localizer<Scalar>& body) {
    if (hooks_.on_localizer) hooks_.on_localizer(step, body);
  }

  SolverResult<Scalar> finish(Termination how) {
    if (!best_) throw Error("solver finished without a feasible query");
    return SolverResult<Scalar>{best_->point, best_->value, queries_, updates_, theorem_bound_, how,
                                std::move(trace_)};
  }

  SolverResult<Scalar> run_interval() {
    IntervalState<Scalar> interval{-radius_, radius_};
    notify(0, interval);
    for (long k = 0; k < budget_; ++k) {
      Vector<Scalar> center(1);
      center(0) = interval.midpoint();
      Query q = query(center);
      if (std::holds_alternative<OptimalCertificate<Scalar>>(q.outcome)) {
        record(k, center, true, std::nullopt, interval.length());
        return finish(Termination::ZeroSubgradient);
      }
      interval = interval_update(interval, std::get<Cut<Scalar>>(q.outcome).normal(0));
      ++updates_;
      record(k, center, true, CutKind::Subgradient, interval.length());
      notify(k + 1, interval);
    }
    return finish(Termination::Budget);
  }

  SolverResult<Scalar> run_ellipsoid() {
    Ellipsoid<Scalar> body = Ellipsoid<Scalar>::ball(config_.d, radius_);
    notify(0, body);
    for (long k = 0; k < budget_; ++k) {
      const Vector<Scalar> center = body.center;
      const Scalar norm = center.norm();
      Cut<Scalar> cut;
      bool feasible = true;
      if (norm > radius_ + Scalar(1e-12)) {
        cut = feasibility_cut(center, radius_);
        feasible = false;
      } else {
        // Centers in the slack band are pulled radially onto the closed ball.
        const Vector<Scalar> lifted = norm > radius_ ? Vector<Scalar>(center * (radius_ / norm)) : center;
        Query q = query(lifted);
        if (std::holds_alternative<OptimalCertificate<Scalar>>(q.outcome)) {
          record(k, center, true, std::nullopt, current_log_det(body));
          return finish(Termination::ZeroSubgradient);
        }
        cut = std::get<Cut<Scalar>>(std::move(q.outcome));
        cut.center = center;
      }

      try {
        body = ellipsoid_update(body, cut.normalized(), k);
        if ((k + 1) % 50 == 0 && Eigen::LLT<Matrix<Scalar>>(body.shape).info() != Eigen::Success) {
          throw BreakdownError("ellipsoid shape failed the periodic Cholesky check", k);
        }
        ++updates_;
        record(k, center, feasible, cut.kind, config_.record_trace ? current_log_det(body) : Scalar(0));
      } catch (const BreakdownError& e) {
        record(k, center, feasible, cut.kind, std::numeric_limits<Scalar>::quiet_NaN());
        throw SolverBreakdownError<Scalar>(e, finish(Termination::Breakdown));
      }
      notify(k + 1, body);
    }
    return finish(Termination::Budget);
  }

  Scalar current_log_det(const Ellipsoid<Scalar>& body) const {
    try {
      return body.log_det();
    } catch (const NumericValidityError&) {
      throw BreakdownError("ellipsoid shape is not positive definite", updates_);
    }
  }

  struct Best {
    HyperboloidPoint<Scalar> point;
    Scalar value;
  };

  const SolverConfig<Scalar>& config_;
  const LorentzFrame<Scalar>& frame_;
  const FirstOrderOracle<Scalar>& oracle_;
  const SolverHooks<Scalar>& hooks_;
  int theorem_bound_ = 0;
  long budget_ = 0;
  Scalar radius_ = Scalar(0);
  long queries_ = 0;
  long updates_ = 0;
  Scalar last_value_ = Scalar(0);
  std::optional<Best> best_;
  std::vector<QueryRecord<Scalar>> trace_;
};

}  // namespace detail

/// Runs the method on B(frame.base(), config.r) and returns the best feasible query.
template <typename Scalar>
SolverResult<Scalar> solve(const SolverConfig<Scalar>& config, const LorentzFrame<Scalar>& frame,
                           const FirstOrderOracle<Scalar>& oracle, const SolverHooks<Scalar>& hooks = {}) {
  return detail::SolverRun<Scalar>(config, frame, oracle, hooks).run();
}

/// (best_value - f*) / (M r).
template <typename Scalar>
Scalar certify_gap(const SolverResult<Scalar>& result, Scalar known_fstar, const SolverConfig<Scalar>& config) {
  if (!std::isfinite(static_cast<double>(known_fstar))) throw UsageError("certify_gap: f* must be finite");
  return (result.best_value - known_fstar) / (config.lipschitz_m * config.r);
}

}  // namespace hyperklein
