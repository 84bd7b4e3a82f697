#pragma once

// Beltrami-Klein coordinates relative to a Lorentz-orthonormal frame.
//
// For a frame (E_0 = x0, E_1..E_d) the chart is
//   Phi(X) = (<X,E_1>_L, ..., <X,E_d>_L) / (-<X,E_0>_L),
// with inverse X(u) = (E_0 + sum u_i E_i) / sqrt(1 - |u|^2). Geodesics map
// to straight chords and the ball of radius r about x0 maps onto the
// Euclidean ball of radius tanh(kappa r).

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hyperklein/errors.hpp"
#include "hyperklein/lorentz.hpp"

namespace hyperklein {

template <typename Scalar>
using KleinPoint = Vector<Scalar>;

/// Lorentz-orthonormal frame: columns E_0..E_d of a (d+1)x(d+1) matrix.
template <typename Scalar_>
class LorentzFrame {
 public:
  using Scalar = Scalar_;

  LorentzFrame(Matrix<Scalar> axes, Scalar kappa = Scalar(1)) : axes_(std::move(axes)), kappa_(kappa) {
    using std::abs;
    const Eigen::Index n = axes_.rows();
    if (n < 2 || axes_.cols() != n) throw UsageError("frame must be a square (d+1)x(d+1) matrix with d >= 1");
    if (!(kappa_ > Scalar(0))) throw UsageError("curvature kappa must be positive");
    if (!(axes_(0, 0) > Scalar(0))) throw DegenerateFrameError("frame base point is on the lower sheet");
    const Matrix<Scalar> gram = axes_.transpose() * signature() * axes_;
    Matrix<Scalar> expected = Matrix<Scalar>::Identity(n, n);
    expected(0, 0) = Scalar(-1);
    const Scalar scale = std::max<Scalar>(Scalar(1), axes_.cwiseAbs().maxCoeff());
    const Scalar err = (gram - expected).cwiseAbs().maxCoeff();
    if (err > Scalar(1e-10) * scale * scale) {
      throw DegenerateFrameError("frame is not Lorentz-orthonormal (Gram error " +
                                 std::to_string(static_cast<double>(err)) + ")");
    }
  }

  /// E_0 = o and E_i = e_i.
  static LorentzFrame canonical(Eigen::Index d, Scalar kappa = Scalar(1)) {
    return LorentzFrame(Matrix<Scalar>::Identity(d + 1, d + 1), kappa);
  }

  Eigen::Index dim() const noexcept { return axes_.rows() - 1; }
  Scalar kappa() const noexcept { return kappa_; }
  const Matrix<Scalar>& axes() const noexcept { return axes_; }
  auto axis(Eigen::Index i) const { return axes_.col(i); }
  HyperboloidPoint<Scalar> base() const { return HyperboloidPoint<Scalar>(axes_.col(0), kappa_); }

  /// diag(-1, 1, ..., 1).
  Matrix<Scalar> signature() const {
    Matrix<Scalar> j = Matrix<Scalar>::Identity(axes_.rows(), axes_.rows());
    j(0, 0) = Scalar(-1);
    return j;
  }

  /// (<w,E_0>_L, ..., <w,E_d>_L).
  Vector<Scalar> pairings(const LorentzVector<Scalar>& w) const {
    LorentzVector<Scalar> jw = w;
    jw(0) = -jw(0);
    return axes_.transpose() * jw;
  }

 private:
  Matrix<Scalar> axes_;
  Scalar kappa_;
};

namespace detail {

// 1 - |u|^2 as (1 - |u|)(1 + |u|).
template <typename Derived>
typename Derived::Scalar one_minus_norm2(const Eigen::MatrixBase<Derived>& u) {
  const auto n = u.norm();
  return (1 - n) * (1 + n);
}

template <typename Scalar>
void require_frame_matches(const LorentzFrame<Scalar>& frame, const HyperboloidPoint<Scalar>& x) {
  if (frame.dim() != x.dim()) throw UsageError("frame and point have different dimensions");
  if (frame.kappa() != x.kappa()) throw UsageError("frame and point carry different curvatures");
}

}  // namespace detail

template <typename Scalar>
KleinPoint<Scalar> to_klein(const LorentzFrame<Scalar>& frame, const HyperboloidPoint<Scalar>& x) {
  detail::require_frame_matches(frame, x);
  const Vector<Scalar> p = frame.pairings(x.coords());
  const Scalar denom = -p(0);
  if (denom < Scalar(1) - Scalar(1e-9)) {
    throw InvalidPointError("point lies on the wrong sheet relative to the frame (-<X,E_0>_L = " +
                            std::to_string(static_cast<double>(denom)) + ")");
  }
  return p.tail(frame.dim()) / denom;
}

template <typename Scalar>
HyperboloidPoint<Scalar> from_klein(const LorentzFrame<Scalar>& frame, const KleinPoint<Scalar>& u) {
  using std::sqrt;
  if (u.size() != frame.dim()) throw UsageError("Klein point dimension does not match the frame");
  if (!u.allFinite() || u.norm() > Scalar(1) - Scalar(1e-12)) {
    throw BoundaryError("Klein point too close to the unit sphere to lift (|u| = " +
                        std::to_string(static_cast<double>(u.norm())) + ")");
  }
  const Eigen::Index d = frame.dim();
  const LorentzVector<Scalar> lifted =
      (frame.axes().col(0) + frame.axes().rightCols(d) * u) / sqrt(detail::one_minus_norm2(u));
  return renormalize(lifted, frame.kappa());
}

/// Lorentz Gram-Schmidt at x0.
///
/// Seeds default to e_1..e_d. Each seed is projected to T_{x0}, orthogonalized
/// against the axes found so far (two passes) and kept if its pivot norm is at
/// least 1e-10; the first d survivors in index order become E_1..E_d.
template <typename Scalar>
LorentzFrame<Scalar> build_frame(const HyperboloidPoint<Scalar>& x0,
                                 const std::optional<std::vector<LorentzVector<Scalar>>>& seeds = std::nullopt) {
  using std::sqrt;
  const Eigen::Index d = x0.dim();
  std::vector<LorentzVector<Scalar>> candidates;
  if (seeds) {
    candidates = *seeds;
  } else {
    for (Eigen::Index i = 1; i <= d; ++i) candidates.push_back(LorentzVector<Scalar>::Unit(d + 1, i));
  }

  Matrix<Scalar> axes = Matrix<Scalar>::Zero(d + 1, d + 1);
  axes.col(0) = x0.coords();
  Eigen::Index found = 0;
  for (const auto& seed : candidates) {
    if (found == d) break;
    if (seed.size() != d + 1) throw UsageError("frame seed direction has the wrong dimension");
    LorentzVector<Scalar> w = seed;
    for (int pass = 0; pass < 2; ++pass) {
      w += minkowski_inner(w, axes.col(0)) * LorentzVector<Scalar>(axes.col(0));
      for (Eigen::Index j = 1; j <= found; ++j) {
        w -= minkowski_inner(w, axes.col(j)) * LorentzVector<Scalar>(axes.col(j));
      }
    }
    const Scalar norm2 = minkowski_inner(w, w);
    if (!(norm2 > Scalar(0)) || sqrt(norm2) < Scalar(1e-10)) continue;
    axes.col(++found) = w / sqrt(norm2);
  }
  if (found < d) {
    throw DegenerateFrameError("seed directions span only " + std::to_string(found) + " of " +
                               std::to_string(d) + " tangent dimensions");
  }
  return LorentzFrame<Scalar>(std::move(axes), x0.kappa());
}

/// R_s = tanh s, the Klein radius of a hyperbolic ball of dimensionless radius s.
template <typename Scalar>
Scalar klein_radius(Scalar s) {
  if (!(s > Scalar(0))) throw UsageError("klein_radius: s must be positive");
  using std::tanh;
  return tanh(s);
}

/// L_s = M cosh^2(s) / kappa, the Euclidean Lipschitz constant of the pullback.
template <typename Scalar>
Scalar pullback_lipschitz(Scalar lipschitz_m, Scalar kappa, Scalar s) {
  if (!(lipschitz_m > Scalar(0)) || !(kappa > Scalar(0)) || !(s > Scalar(0))) {
    throw UsageError("pullback_lipschitz: M, kappa and s must be positive");
  }
  using std::cosh;
  const Scalar c = cosh(s);
  return lipschitz_m * c * c / kappa;
}

/// Riemannian length of DX(u)[h]:
///   kappa^-1 sqrt(|h|^2 / (1-|u|^2) + (u.h)^2 / (1-|u|^2)^2).
template <typename Scalar>
Scalar klein_metric_norm(const KleinPoint<Scalar>& u, const Vector<Scalar>& h, Scalar kappa) {
  using std::sqrt;
  if (u.size() != h.size()) throw UsageError("klein_metric_norm: dimension mismatch");
  if (!(u.norm() < Scalar(1))) throw BoundaryError("klein_metric_norm: u must lie in the open unit ball");
  const Scalar gap = detail::one_minus_norm2(u);
  const Scalar along = u.dot(h);
  return sqrt(h.squaredNorm() / gap + along * along / (gap * gap)) / kappa;
}

}  // namespace hyperklein
