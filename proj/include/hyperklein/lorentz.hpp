#pragma once

// Hyperboloid model of hyperbolic space with curvature -kappa^2.
//
// Points live on the unit sheet {X : <X,X>_L = -1, X_0 > 0}; the curvature
// only enters through the metric <U,V>_X = kappa^-2 <U,V>_L, so a point
// carries its kappa alongside its coordinates.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hyperklein/errors.hpp"

namespace hyperklein {

template <typename Scalar>
using LorentzVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// -u0 v0 + sum_{i>=1} ui vi.
template <typename DerivedU, typename DerivedV>
typename DerivedU::Scalar minkowski_inner(const Eigen::MatrixBase<DerivedU>& u,
                                          const Eigen::MatrixBase<DerivedV>& v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw UsageError("minkowski_inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  }
  const Eigen::Index d = u.size() - 1;
  return -u(0) * v(0) + u.tail(d).dot(v.tail(d));
}

template <typename Derived>
typename Derived::Scalar lorentz_sup_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().maxCoeff();
}

namespace detail {

// Machine-checkable tolerance for <X,X>_L = -1. The rounding error of the
// form grows like X_0^2, so the absolute 1e-9 is relaxed for far points.
template <typename Scalar>
Scalar sheet_tolerance(Scalar x0) {
  return Scalar(1e-9) * std::max<Scalar>(Scalar(1), x0 * x0);
}

// Tolerance for <g,X>_L = 0. Besides the eps |g| |X| rounding of the form, a
// vector built from X inherits the sheet error of X, which is of order X_0^2 eps.
template <typename Scalar>
Scalar tangency_tolerance(Scalar x0, Scalar g_sup) {
  return Scalar(1e-9) * (Scalar(1) + g_sup) * std::max<Scalar>(Scalar(1), x0);
}

// -<X,X>_L evaluated as (x0 - |x|)(x0 + |x|).
template <typename Derived>
typename Derived::Scalar negative_self_inner(const Eigen::MatrixBase<Derived>& x) {
  const auto spatial = x.tail(x.size() - 1).norm();
  return (x(0) - spatial) * (x(0) + spatial);
}

// theta / sinh(theta), with the series 1 - t^2/6 + 7t^4/360 near zero.
template <typename Scalar>
Scalar theta_over_sinh(Scalar theta) {
  using std::abs;
  using std::sinh;
  if (abs(theta) < Scalar(1e-4)) {
    const Scalar t2 = theta * theta;
    return Scalar(1) - t2 / Scalar(6) + Scalar(7) * t2 * t2 / Scalar(360);
  }
  return theta / sinh(theta);
}

// arcosh(1 + delta) = log1p(delta + sqrt(delta (delta + 2))).
template <typename Scalar>
Scalar arcosh_one_plus(Scalar delta) {
  using std::log1p;
  using std::sqrt;
  return log1p(delta + sqrt(delta * (delta + Scalar(2))));
}

// cosh(dist) - 1 between two sheet points, from spatial parts only:
//   2 sinh^2((a - b)/2) + |x||y| |x^ - y^|^2 / 2,  a = asinh|x|, b = asinh|y|.
// Both terms are nonnegative, so nothing cancels near the diagonal.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar cosh_distance_minus_one(const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  using std::asinh;
  using std::sinh;
  const Eigen::Index d = x.size() - 1;
  const Scalar nx = x.tail(d).norm();
  const Scalar ny = y.tail(d).norm();
  const Scalar half_gap = sinh((asinh(nx) - asinh(ny)) / Scalar(2));
  Scalar delta = Scalar(2) * half_gap * half_gap;
  if (nx > Scalar(0) && ny > Scalar(0)) {
    delta += nx * ny * (x.tail(d) / nx - y.tail(d) / ny).squaredNorm() / Scalar(2);
  }
  return delta;
}

// Y_0 - X_0 = cosh b - cosh a = 2 sinh((a+b)/2) sinh((b-a)/2).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar time_difference(const Eigen::MatrixBase<DerivedX>& x,
                                          const Eigen::MatrixBase<DerivedY>& y) {
  using std::asinh;
  using std::sinh;
  const Eigen::Index d = x.size() - 1;
  const auto a = asinh(x.tail(d).norm());
  const auto b = asinh(y.tail(d).norm());
  return 2 * sinh((a + b) / 2) * sinh((b - a) / 2);
}

}  // namespace detail

/// A point on the upper sheet of the unit hyperboloid, tagged with kappa.
template <typename Scalar_>
class HyperboloidPoint {
 public:
  using Scalar = Scalar_;

  HyperboloidPoint(LorentzVector<Scalar> coords, Scalar kappa = Scalar(1))
      : coords_(std::move(coords)), kappa_(kappa) {
    using std::abs;
    if (coords_.size() < 2) throw InvalidPointError("hyperboloid point needs d >= 1");
    if (!coords_.allFinite()) throw InvalidPointError("hyperboloid point has non-finite coordinates");
    if (!(kappa_ > Scalar(0)) || !std::isfinite(static_cast<double>(kappa_))) {
      throw UsageError("curvature kappa must be positive and finite");
    }
    if (!(coords_(0) > Scalar(0))) throw InvalidPointError("hyperboloid point is not on the upper sheet");
    const Scalar gap = abs(Scalar(1) - detail::negative_self_inner(coords_));
    if (gap > detail::sheet_tolerance(coords_(0))) {
      throw InvalidPointError("hyperboloid point is off the sheet: |<X,X>_L + 1| = " +
                              std::to_string(static_cast<double>(gap)));
    }
  }

  /// The base point o = (1, 0, ..., 0).
  static HyperboloidPoint origin(Eigen::Index d, Scalar kappa = Scalar(1)) {
    LorentzVector<Scalar> o = LorentzVector<Scalar>::Zero(d + 1);
    o(0) = Scalar(1);
    return HyperboloidPoint(std::move(o), kappa);
  }

  const LorentzVector<Scalar>& coords() const noexcept { return coords_; }
  Scalar kappa() const noexcept { return kappa_; }
  Eigen::Index dim() const noexcept { return coords_.size() - 1; }

 private:
  LorentzVector<Scalar> coords_;
  Scalar kappa_;
};

/// A vector Lorentz-orthogonal to its base point.
template <typename Scalar_>
class TangentVector {
 public:
  using Scalar = Scalar_;

  TangentVector(HyperboloidPoint<Scalar> base, LorentzVector<Scalar> coords)
      : base_(std::move(base)), coords_(std::move(coords)) {
    using std::abs;
    if (coords_.size() != base_.coords().size()) {
      throw UsageError("tangent vector dimension does not match its base point");
    }
    if (!coords_.allFinite()) throw UsageError("tangent vector has non-finite coordinates");
    const Scalar residual = abs(minkowski_inner(coords_, base_.coords()));
    if (residual > detail::tangency_tolerance(base_.coords()(0), lorentz_sup_norm(coords_))) {
      throw UsageError("vector is not tangent at its base point: |<g,X>_L| = " +
                       std::to_string(static_cast<double>(residual)));
    }
  }

  static TangentVector zero(const HyperboloidPoint<Scalar>& base) {
    return TangentVector(base, LorentzVector<Scalar>::Zero(base.coords().size()));
  }

  const HyperboloidPoint<Scalar>& base() const noexcept { return base_; }
  const LorentzVector<Scalar>& coords() const noexcept { return coords_; }

 private:
  HyperboloidPoint<Scalar> base_;
  LorentzVector<Scalar> coords_;
};

namespace detail {

template <typename Scalar>
void require_same_curvature(const HyperboloidPoint<Scalar>& x, const HyperboloidPoint<Scalar>& y) {
  if (x.kappa() != y.kappa()) throw UsageError("points carry different curvatures");
  if (x.dim() != y.dim()) throw UsageError("points have different dimensions");
}

template <typename Scalar>
void require_same_base(const TangentVector<Scalar>& g, const TangentVector<Scalar>& h) {
  const auto& a = g.base().coords();
  const auto& b = h.base().coords();
  if (a.size() != b.size() || (a - b).cwiseAbs().maxCoeff() > Scalar(1e-12) * (Scalar(1) + lorentz_sup_norm(a))) {
    throw UsageError("tangent vectors live at different base points");
  }
}

}  // namespace detail

/// kappa^-2 <g,h>_L for tangent vectors at a common base point.
template <typename Scalar>
Scalar riemannian_inner(const TangentVector<Scalar>& g, const TangentVector<Scalar>& h) {
  detail::require_same_base(g, h);
  const Scalar kappa = g.base().kappa();
  return minkowski_inner(g.coords(), h.coords()) / (kappa * kappa);
}

/// sqrt(<v,v>_L) for a tangent vector.
///
/// Evaluated through the spatial part only: writing p for the component of
/// v-bar along x-bar, <v,v>_L = |v-bar - p x^|^2 + p^2 / X_0^2, a sum of
/// nonnegative terms that stays accurate far from the origin.
template <typename Scalar>
Scalar lorentz_norm(const TangentVector<Scalar>& v) {
  using std::sqrt;
  const auto& x = v.base().coords();
  const Eigen::Index d = x.size() - 1;
  const Vector<Scalar> spatial = v.coords().tail(d);
  const Scalar nx = x.tail(d).norm();
  if (nx == Scalar(0)) return spatial.norm();
  const Vector<Scalar> axis = x.tail(d) / nx;
  const Scalar along = axis.dot(spatial);
  const Scalar across2 = (spatial - along * axis).squaredNorm();
  return sqrt(across2 + along * along / (x(0) * x(0)));
}

template <typename Scalar>
Scalar riemannian_norm(const TangentVector<Scalar>& v) {
  return lorentz_norm(v) / v.base().kappa();
}

/// Geodesic distance kappa^-1 arcosh(-<X,Y>_L).
template <typename Scalar>
Scalar distance(const HyperboloidPoint<Scalar>& x, const HyperboloidPoint<Scalar>& y) {
  detail::require_same_curvature(x, y);
  const Scalar raw = -minkowski_inner(x.coords(), y.coords());
  const Scalar slack = Scalar(1e-9) * std::max<Scalar>(Scalar(1), x.coords()(0) * y.coords()(0));
  if (raw < Scalar(1) - slack) {
    throw NumericValidityError("-<X,Y>_L = " + std::to_string(static_cast<double>(raw)) + " is below 1");
  }
  const Scalar delta = detail::cosh_distance_minus_one(x.coords(), y.coords());
  return detail::arcosh_one_plus(delta) / x.kappa();
}

/// Riemannian logarithm (theta / sinh theta)(Y - cosh(theta) X).
template <typename Scalar>
TangentVector<Scalar> log_map(const HyperboloidPoint<Scalar>& x, const HyperboloidPoint<Scalar>& y) {
  detail::require_same_curvature(x, y);
  const auto& xc = x.coords();
  const auto& yc = y.coords();
  const Eigen::Index d = x.dim();
  const Scalar delta = detail::cosh_distance_minus_one(xc, yc);
  if (delta == Scalar(0)) return TangentVector<Scalar>::zero(x);
  const Scalar theta = detail::arcosh_one_plus(delta);

  // Y - cosh(theta) X = (Y - X) - (cosh(theta) - 1) X.
  LorentzVector<Scalar> w(d + 1);
  w(0) = detail::time_difference(xc, yc) - delta * xc(0);
  w.tail(d) = (yc.tail(d) - xc.tail(d)) - delta * xc.tail(d);
  return TangentVector<Scalar>(x, detail::theta_over_sinh(theta) * w);
}

/// Divides by sqrt(-<X,X>_L) to put a timelike future vector back on the sheet.
template <typename Scalar>
HyperboloidPoint<Scalar> renormalize(const LorentzVector<Scalar>& x, Scalar kappa = Scalar(1)) {
  using std::sqrt;
  if (x.size() < 2 || !x.allFinite()) throw InvalidPointError("renormalize: malformed coordinates");
  if (!(x(0) > Scalar(0))) throw InvalidPointError("renormalize: X_0 must be positive");
  const Scalar neg = detail::negative_self_inner(x);
  if (!(neg > Scalar(0))) throw InvalidPointError("renormalize: <X,X>_L must be negative");
  return HyperboloidPoint<Scalar>(x / sqrt(neg), kappa);
}

template <typename Scalar>
HyperboloidPoint<Scalar> renormalize(const HyperboloidPoint<Scalar>& x) {
  return renormalize(x.coords(), x.kappa());
}

/// cosh(t) X + sinh(t) v / t with t the Lorentz norm of v, renormalized.
template <typename Scalar>
HyperboloidPoint<Scalar> exp_map(const HyperboloidPoint<Scalar>& x, const TangentVector<Scalar>& v) {
  using std::abs;
  using std::cosh;
  using std::sinh;
  const Scalar residual = abs(minkowski_inner(v.coords(), x.coords()));
  if (residual > detail::tangency_tolerance(x.coords()(0), lorentz_sup_norm(v.coords()))) {
    throw UsageError("exp_map: vector is not tangent at the given point");
  }
  const TangentVector<Scalar> at_x(x, v.coords());
  const Scalar t = lorentz_norm(at_x);
  if (t == Scalar(0)) return x;
  return renormalize(LorentzVector<Scalar>(cosh(t) * x.coords() + (sinh(t) / t) * v.coords()), x.kappa());
}

/// w + <w,X>_L X.
template <typename Scalar>
TangentVector<Scalar> project_to_tangent(const HyperboloidPoint<Scalar>& x, const LorentzVector<Scalar>& w) {
  if (w.size() != x.coords().size()) throw UsageError("project_to_tangent: dimension mismatch");
  return TangentVector<Scalar>(x, w + minkowski_inner(w, x.coords()) * x.coords());
}

}  // namespace hyperklein
