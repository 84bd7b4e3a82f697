#pragma once

// Euclidean localization bodies: the central-cut ellipsoid (d >= 2) and the
// midpoint interval (d = 1).

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <string>

#include "hyperklein/cuts.hpp"
#include "hyperklein/errors.hpp"
#include "hyperklein/lorentz.hpp"

namespace hyperklein {

/// E(c, Q) = {u : (u - c)^T Q^-1 (u - c) <= 1}, Q symmetric positive definite.
template <typename Scalar>
struct Ellipsoid {
  Vector<Scalar> center;
  Matrix<Scalar> shape;

  static Ellipsoid ball(Eigen::Index d, Scalar radius) {
    return Ellipsoid{Vector<Scalar>::Zero(d), radius * radius * Matrix<Scalar>::Identity(d, d)};
  }

  Eigen::Index dim() const noexcept { return center.size(); }

  /// log det Q; throws NumericValidityError if Q is not positive definite.
  Scalar log_det() const {
    Eigen::LLT<Matrix<Scalar>> llt(shape);
    if (llt.info() != Eigen::Success) throw NumericValidityError("ellipsoid shape is not positive definite");
    Matrix<Scalar> l = llt.matrixL();
    return Scalar(2) * l.diagonal().array().log().sum();
  }
};

/// Midpoint interval [lo, hi] for the one-dimensional branch.
template <typename Scalar>
struct IntervalState {
  Scalar lo;
  Scalar hi;

  Scalar midpoint() const { return (lo + hi) / Scalar(2); }
  Scalar length() const { return hi - lo; }
};

/// Central-cut update
///   b = Q a / sqrt(a^T Q a),  c+ = c - b/(d+1),
///   Q+ = d^2/(d^2-1) (Q - 2/(d+1) b b^T),
/// followed by symmetrization. The iteration index only labels errors.
template <typename Scalar>
Ellipsoid<Scalar> ellipsoid_update(const Ellipsoid<Scalar>& ellipsoid, const Cut<Scalar>& cut, long iteration = -1) {
  using std::sqrt;
  const Eigen::Index d = ellipsoid.dim();
  if (d < 2) throw UsageError("ellipsoid_update requires d >= 2; use the interval branch for d = 1");
  if (cut.normal.size() != d || cut.center.size() != d) throw UsageError("cut dimension does not match ellipsoid");
  const Scalar drift = (cut.center - ellipsoid.center).cwiseAbs().maxCoeff();
  if (drift > Scalar(1e-10) * (Scalar(1) + ellipsoid.center.cwiseAbs().maxCoeff())) {
    throw UsageError("ellipsoid_update expects a central cut through the current center");
  }

  const Vector<Scalar> qa = ellipsoid.shape * cut.normal;
  const Scalar aqa = cut.normal.dot(qa);
  if (!(aqa > Scalar(0)) || !std::isfinite(static_cast<double>(aqa))) {
    throw BreakdownError("ellipsoid shape lost definiteness: a^T Q a = " + std::to_string(static_cast<double>(aqa)),
                         iteration);
  }
  const Scalar n = static_cast<Scalar>(d);
  const Vector<Scalar> b = qa / sqrt(aqa);

  Ellipsoid<Scalar> next;
  next.center = ellipsoid.center - b / (n + Scalar(1));
  next.shape = ellipsoid.shape;
  next.shape.noalias() -= (Scalar(2) / (n + Scalar(1))) * b * b.transpose();
  next.shape *= n * n / (n * n - Scalar(1));
  next.shape = (next.shape + next.shape.transpose()) / Scalar(2);
  return next;
}

/// vol(E+) / vol(E) = d^d / ((d+1) (d^2-1)^((d-1)/2)).
template <typename Scalar = double>
Scalar ellipsoid_volume_ratio(int d) {
  using std::exp;
  using std::log;
  if (d < 2) throw UsageError("ellipsoid_volume_ratio requires d >= 2");
  const Scalar n = static_cast<Scalar>(d);
  return exp(n * log(n) - log(n + Scalar(1)) - (n - Scalar(1)) / Scalar(2) * log(n * n - Scalar(1)));
}

/// Keeps [lo, c] when the cut normal is positive and [c, hi] when negative.
template <typename Scalar>
IntervalState<Scalar> interval_update(const IntervalState<Scalar>& interval, Scalar normal) {
  if (!(interval.hi > interval.lo)) throw UsageError("interval_update: degenerate interval");
  if (normal == Scalar(0) || !std::isfinite(static_cast<double>(normal))) {
    throw UsageError("interval_update: cut normal must be nonzero");
  }
  const Scalar mid = interval.midpoint();
  return normal > Scalar(0) ? IntervalState<Scalar>{interval.lo, mid} : IntervalState<Scalar>{mid, interval.hi};
}

/// (u - c)^T Q^-1 (u - c) <= 1 + slack, via a Cholesky solve.
template <typename Scalar>
bool contains(const Ellipsoid<Scalar>& ellipsoid, const Vector<Scalar>& u, Scalar slack = Scalar(1e-9)) {
  if (u.size() != ellipsoid.dim()) throw UsageError("contains: dimension mismatch");
  Eigen::LLT<Matrix<Scalar>> llt(ellipsoid.shape);
  if (llt.info() != Eigen::Success) throw NumericValidityError("ellipsoid shape is not positive definite");
  const Vector<Scalar> z = llt.matrixL().solve(u - ellipsoid.center);
  return z.squaredNorm() <= Scalar(1) + slack;
}

template <typename Scalar>
bool contains(const IntervalState<Scalar>& interval, Scalar u, Scalar slack = Scalar(1e-9)) {
  return u >= interval.lo - slack && u <= interval.hi + slack;
}

}  // namespace hyperklein
