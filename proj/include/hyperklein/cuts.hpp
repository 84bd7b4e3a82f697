#pragma once

// Exact Euclidean central cuts in the Klein chart.
//
// A Riemannian subgradient g at X = X(c) yields the halfspace
// a(g)^T (u - c) <= 0 with a(g)_i = <g, E_i>_L; it contains the Klein image
// of the sublevel set {f <= f(X)}, because <g, log_X Y>_X and a^T (u - c)
// differ by a positive factor.

#include <Eigen/Core>

#include <string>
#include <variant>

#include "hyperklein/errors.hpp"
#include "hyperklein/klein.hpp"
#include "hyperklein/lorentz.hpp"

namespace hyperklein {

enum class CutKind { Subgradient, Feasibility };

inline const char* to_string(CutKind kind) {
  return kind == CutKind::Subgradient ? "subgradient" : "feasibility";
}

/// The halfspace {u : normal^T (u - center) <= 0}.
template <typename Scalar>
struct Cut {
  Vector<Scalar> normal;
  KleinPoint<Scalar> center;
  CutKind kind = CutKind::Subgradient;

  /// normal^T (u - center); nonpositive inside the halfspace.
  Scalar offset(const Vector<Scalar>& u) const { return normal.dot(u - center); }

  /// Same halfspace with a unit-length normal.
  Cut normalized() const {
    const Scalar n = normal.norm();
    if (!(n > Scalar(0))) throw UsageError("cannot normalize a cut with a zero normal");
    return Cut{normal / n, center, kind};
  }
};

/// The queried point has 0 in its subdifferential and is globally optimal.
template <typename Scalar>
struct OptimalCertificate {
  HyperboloidPoint<Scalar> point;
};

template <typename Scalar>
using CutOrCertificate = std::variant<Cut<Scalar>, OptimalCertificate<Scalar>>;

template <typename Scalar>
CutOrCertificate<Scalar> subgradient_cut(const LorentzFrame<Scalar>& frame, const HyperboloidPoint<Scalar>& x,
                                         const TangentVector<Scalar>& g) {
  using std::abs;
  detail::require_frame_matches(frame, x);
  if (g.coords().size() != x.coords().size()) throw UsageError("subgradient dimension does not match the point");
  const Scalar residual = abs(minkowski_inner(g.coords(), x.coords()));
  if (residual > detail::tangency_tolerance(x.coords()(0), lorentz_sup_norm(g.coords()))) {
    throw UsageError("subgradient is not tangent at the queried point");
  }
  const Vector<Scalar> normal = frame.pairings(g.coords()).tail(frame.dim());
  if (normal.norm() <= Scalar(1e-12) * (Scalar(1) + lorentz_sup_norm(g.coords()))) {
    return OptimalCertificate<Scalar>{x};
  }
  return Cut<Scalar>{normal, to_klein(frame, x), CutKind::Subgradient};
}

/// Cut through an infeasible center c with normal c; it contains the whole
/// feasible ball B(0, R_s).
template <typename Scalar>
Cut<Scalar> feasibility_cut(const Vector<Scalar>& center, Scalar klein_radius) {
  if (!(center.norm() > klein_radius)) {
    throw UsageError("feasibility_cut: center is feasible and must query the oracle instead");
  }
  return Cut<Scalar>{center, center, CutKind::Feasibility};
}

/// <g, log_X Y>_X evaluated as (theta / (kappa^2 sinh theta)) <g, Y>_L.
template <typename Scalar>
Scalar lorentz_pairing(const TangentVector<Scalar>& g, const HyperboloidPoint<Scalar>& y) {
  const auto& x = g.base();
  detail::require_same_curvature(x, y);
  const Scalar theta = detail::arcosh_one_plus(detail::cosh_distance_minus_one(x.coords(), y.coords()));
  const Scalar kappa = x.kappa();
  return detail::theta_over_sinh(theta) / (kappa * kappa) * minkowski_inner(g.coords(), y.coords());
}

}  // namespace hyperklein
