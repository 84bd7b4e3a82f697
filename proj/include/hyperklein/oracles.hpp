#pragma once

// First-order oracles: the distance to a fixed target and the symmetric
// minimax-distance benchmark
//
//   f(X) = max_{i, sigma} dist(X, Y_i^sigma),  Y_i^{+-} = cosh(tau) X* +- sinh(tau) v_i,
//
// whose minimum tau / kappa is attained exactly at X*.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hyperklein/errors.hpp"
#include "hyperklein/klein.hpp"
#include "hyperklein/lorentz.hpp"
#include "hyperklein/solver.hpp"

namespace hyperklein {

/// f(X) = dist(X, target); g = -log_X(target) / dist away from the target, 0 at it.
template <typename Scalar>
FirstOrderOracle<Scalar> distance_oracle(HyperboloidPoint<Scalar> target) {
  return [target = std::move(target)](const HyperboloidPoint<Scalar>& x) {
    const Scalar value = distance(x, target);
    if (value == Scalar(0)) return OracleAnswer<Scalar>{value, TangentVector<Scalar>::zero(x)};
    // Near the target the division amplifies the tangency residual of the log, so project again.
    const TangentVector<Scalar> toward = log_map(x, target);
    return OracleAnswer<Scalar>{value, project_to_tangent(x, LorentzVector<Scalar>(-toward.coords() / value))};
  };
}

/// Inputs that regenerate a seeded benchmark instance bit for bit.
struct MinimaxParams {
  int d = 4;
  double kappa = 1.0;
  double s = 2.0;
  double tau = 0.8;
  double fraction = 0.55;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct MinimaxInstance {
  HyperboloidPoint<Scalar> target;
  LorentzFrame<Scalar> frame_at_target;
  Scalar tau;
  /// Y_1^+, Y_1^-, Y_2^+, ... in that order.
  std::vector<HyperboloidPoint<Scalar>> anchors;
  Scalar fstar;
  std::optional<MinimaxParams> params;

  Eigen::Index dim() const noexcept { return target.dim(); }
  Scalar kappa() const noexcept { return target.kappa(); }
};

/// Anchors from an explicit target and frame. When `ball_s` is given every
/// anchor must lie strictly inside the ball of dimensionless radius ball_s
/// about the origin.
template <typename Scalar>
MinimaxInstance<Scalar> make_minimax_instance(const HyperboloidPoint<Scalar>& target, const LorentzFrame<Scalar>& frame,
                                              Scalar tau, std::optional<Scalar> ball_s = std::nullopt) {
  using std::abs;
  using std::cosh;
  using std::sinh;
  if (!(tau > Scalar(0))) throw UsageError("minimax instance: tau must be positive");
  if (frame.dim() != target.dim() || frame.kappa() != target.kappa()) {
    throw UsageError("minimax instance: frame does not match the target");
  }
  const Scalar drift = (frame.axes().col(0) - target.coords()).cwiseAbs().maxCoeff();
  if (drift > Scalar(1e-9) * (Scalar(1) + lorentz_sup_norm(target.coords()))) {
    throw UsageError("minimax instance: frame is not based at the target");
  }

  const auto origin = HyperboloidPoint<Scalar>::origin(target.dim(), target.kappa());
  std::vector<HyperboloidPoint<Scalar>> anchors;
  for (Eigen::Index i = 1; i <= target.dim(); ++i) {
    for (const Scalar sign : {Scalar(1), Scalar(-1)}) {
      const LorentzVector<Scalar> y = cosh(tau) * target.coords() + sign * sinh(tau) * frame.axis(i);
      const Scalar gap = abs(Scalar(1) - detail::negative_self_inner(y));
      if (gap > Scalar(1e-10) * std::max<Scalar>(Scalar(1), y(0) * y(0))) {
        throw InstanceConstructionError("anchor left the hyperboloid sheet");
      }
      HyperboloidPoint<Scalar> anchor = renormalize(y, target.kappa());
      if (ball_s && !(target.kappa() * distance(origin, anchor) < *ball_s)) {
        throw InstanceConstructionError("anchor " + std::to_string(anchors.size()) + " escapes the feasible ball");
      }
      anchors.push_back(std::move(anchor));
    }
  }
  return MinimaxInstance<Scalar>{target, frame, tau, std::move(anchors), tau / target.kappa(), std::nullopt};
}

/// Seeded instance: Phi(X*) = fraction * tanh(s) * (random unit direction),
/// frame at X* from Gram-Schmidt on Gaussian seed vectors.
template <typename Scalar = double>
MinimaxInstance<Scalar> make_minimax_instance(const MinimaxParams& p) {
  using std::atanh;
  using std::tanh;
  if (p.d < 1) throw UsageError("minimax instance: d must be at least 1");
  if (!(p.kappa > 0.0) || !(p.s > 0.0) || !(p.tau > 0.0)) {
    throw UsageError("minimax instance: kappa, s and tau must be positive");
  }
  if (!(p.fraction >= 0.0 && p.fraction < 1.0)) throw UsageError("minimax instance: fraction must lie in [0, 1)");

  const Scalar s = static_cast<Scalar>(p.s);
  const Scalar tau = static_cast<Scalar>(p.tau);
  const Scalar kappa = static_cast<Scalar>(p.kappa);
  const Scalar target_norm = static_cast<Scalar>(p.fraction) * tanh(s);
  if (atanh(target_norm) + tau > s) {
    throw InstanceConstructionError("tau too large: artanh(|Phi(X*)|) + tau = " +
                                    std::to_string(static_cast<double>(atanh(target_norm) + tau)) + " exceeds s = " +
                                    std::to_string(p.s));
  }

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  Vector<Scalar> direction(p.d);
  do {
    for (int i = 0; i < p.d; ++i) direction(i) = static_cast<Scalar>(gaussian(rng));
  } while (direction.norm() == Scalar(0));
  direction /= direction.norm();

  const auto chart = LorentzFrame<Scalar>::canonical(p.d, kappa);
  const HyperboloidPoint<Scalar> target = from_klein(chart, KleinPoint<Scalar>(target_norm * direction));

  std::vector<LorentzVector<Scalar>> seeds;
  for (int i = 0; i < p.d; ++i) {
    LorentzVector<Scalar> v(p.d + 1);
    for (int j = 0; j <= p.d; ++j) v(j) = static_cast<Scalar>(gaussian(rng));
    seeds.push_back(std::move(v));
  }
  const LorentzFrame<Scalar> frame = build_frame(target, std::optional(seeds));

  MinimaxInstance<Scalar> instance = make_minimax_instance(target, frame, tau, std::optional<Scalar>(s));
  instance.params = p;
  return instance;
}

template <typename Scalar>
struct MinimaxEvaluation {
  Scalar value;
  std::size_t active;  // index into anchors
  TangentVector<Scalar> subgradient;
};

/// Maximum over anchor distances; ties go to the lowest index, + before -.
/// At X* itself the subgradient is 0.
template <typename Scalar>
MinimaxEvaluation<Scalar> evaluate_minimax(const MinimaxInstance<Scalar>& instance, const HyperboloidPoint<Scalar>& x) {
  std::size_t active = 0;
  Scalar best = distance(x, instance.anchors[0]);
  for (std::size_t j = 1; j < instance.anchors.size(); ++j) {
    const Scalar dj = distance(x, instance.anchors[j]);
    if (dj > best) {
      best = dj;
      active = j;
    }
  }
  if (distance(x, instance.target) == Scalar(0)) {
    return MinimaxEvaluation<Scalar>{instance.fstar, active, TangentVector<Scalar>::zero(x)};
  }
  const TangentVector<Scalar> toward = log_map(x, instance.anchors[active]);
  return MinimaxEvaluation<Scalar>{best, active, TangentVector<Scalar>(x, -toward.coords() / best)};
}

template <typename Scalar>
FirstOrderOracle<Scalar> minimax_oracle(MinimaxInstance<Scalar> instance) {
  return [instance = std::move(instance)](const HyperboloidPoint<Scalar>& x) {
    MinimaxEvaluation<Scalar> e = evaluate_minimax(instance, x);
    return OracleAnswer<Scalar>{e.value, std::move(e.subgradient)};
  };
}

}  // namespace hyperklein
