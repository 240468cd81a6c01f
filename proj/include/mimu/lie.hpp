#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <span>
#include <vector>

#include "mimu/errors.hpp"

namespace mimu {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Angle below which exp/log switch to their series expansions. Keeps
/// relative error below 1e-12 across the branch switch.
inline constexpr double kSmallAngle = 1e-8;

/// Skew-symmetric matrix such that hat(v) * w == v.cross(w).
inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0.0, -v.z(),  v.y(),
         v.z(),    0.0, -v.x(),
        -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

/// Inverse of hat for skew-symmetric input.
inline Vec3 vee(const Mat3& m) {
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Nearest orthonormal matrix with det +1 (polar factor via SVD).
inline Mat3 nearest_rotation_matrix(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() > 0.0 ? 1.0 : -1.0;
  return u * d * v.transpose();
}

/// SO(3) element stored as a full 3x3 direction-cosine matrix.
/// After construction or renormalization, R * R^T == I and det R == 1
/// to within 1e-12 per entry.
struct Rotation {
  Mat3 m = Mat3::Identity();

  Rotation() = default;

  /// Construct from a matrix expected to be a rotation. Small drift
  /// (up to 1e-3) is repaired by projecting onto SO(3); anything worse
  /// is rejected.
  explicit Rotation(const Mat3& r) : m(r) {
    const double dev = (m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (dev > 1e-3 || m.determinant() < 0.0) {
      throw std::invalid_argument("Rotation: matrix is not close to SO(3)");
    }
    if (dev > 1e-13) m = nearest_rotation_matrix(m);
  }

  static Rotation identity() { return Rotation{}; }

  /// Trusted constructor: skips validation (for internal products of
  /// already-valid rotations).
  static Rotation from_matrix_unchecked(const Mat3& r) {
    Rotation out;
    out.m = r;
    return out;
  }

  Rotation transposed() const { return from_matrix_unchecked(m.transpose()); }

  Rotation operator*(const Rotation& rhs) const {
    return from_matrix_unchecked(m * rhs.m);
  }

  Vec3 operator*(const Vec3& v) const { return m * v; }

  /// Project back onto SO(3); bounds drift after long products.
  Rotation renormalized() const {
    return from_matrix_unchecked(nearest_rotation_matrix(m));
  }

  bool is_valid(double tol = 1e-9) const {
    return (m * m.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(m.determinant() - 1.0) <= tol;
  }
};

/// Exponential map so(3) -> SO(3) (Rodrigues; second-order series below
/// the small-angle threshold where Rodrigues is ill-conditioned).
inline Rotation exp_so3(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = hat(theta);
  if (angle < kSmallAngle) {
    return Rotation::from_matrix_unchecked(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Rotation::from_matrix_unchecked(Mat3::Identity() + s * k + c * k * k);
}

/// Logarithm map SO(3) -> so(3). Returns the canonical representative
/// with norm <= pi. Near angle pi the generic formula degenerates, so the
/// axis is recovered from the symmetric part (largest diagonal entry of
/// R + R^T); at exactly pi the representative with first nonzero
/// component positive is returned.
inline Vec3 log_so3(const Rotation& R) {
  const Mat3& m = R.m;
  const double cos_angle = std::clamp((m.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(cos_angle);

  if (angle < kSmallAngle) {
    // Ln R ~ vee(R - R^T)/2 for small angles.
    return 0.5 * vee(m - m.transpose());
  }

  if (angle < M_PI - 1e-4) {
    return angle / (2.0 * std::sin(angle)) * vee(m - m.transpose());
  }

  // Near pi: axis from (R + R^T)/2 = cos*I + (1-cos)*n*n^T. The angle from
  // acos is ill-conditioned here; |vee(R - R^T)|/2 = sin(angle) recovers it
  // accurately.
  const Vec3 w = vee(m - m.transpose());
  const double stable_angle = M_PI - std::asin(std::clamp(0.5 * w.norm(), 0.0, 1.0));
  const double stable_cos = std::cos(stable_angle);
  const Mat3 sym = 0.5 * (m + m.transpose());
  int j = 0;
  sym.diagonal().maxCoeff(&j);
  const double denom = 1.0 - stable_cos;
  Vec3 n;
  n[j] = std::sqrt(std::max(0.0, (sym(j, j) - stable_cos) / denom));
  for (int i = 0; i < 3; ++i) {
    if (i != j) n[i] = sym(i, j) / (denom * n[j]);
  }
  n.normalize();

  // Orient the axis: away from pi use the antisymmetric part, at pi fix
  // the sign deterministically.
  if (w.norm() > 1e-12) {
    if (n.dot(w) < 0.0) n = -n;
  } else {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(n[i]) > 1e-12) {
        if (n[i] < 0.0) n = -n;
        break;
      }
    }
  }
  return stable_angle * n;
}

/// Right Jacobian of SO(3): Exp(theta + d) ~ Exp(theta) * Exp(Jr(theta) d).
inline Mat3 right_jacobian(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = hat(theta);
  if (angle < kSmallAngle) {
    return Mat3::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double a2 = angle * angle;
  const double c1 = (1.0 - std::cos(angle)) / a2;
  const double c2 = (angle - std::sin(angle)) / (a2 * angle);
  return Mat3::Identity() - c1 * k + c2 * k * k;
}

inline Mat3 right_jacobian_inverse(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = hat(theta);
  if (angle < kSmallAngle) {
    return Mat3::Identity() + 0.5 * k + (1.0 / 12.0) * k * k;
  }
  const double c = 1.0 / (angle * angle) -
                   (1.0 + std::cos(angle)) / (2.0 * angle * std::sin(angle));
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

/// Geodesic distance (rotation angle of Ra^T * Rb), in radians.
inline double geodesic_distance(const Rotation& a, const Rotation& b) {
  return log_so3(a.transposed() * b).norm();
}

/// Iterative geodesic (Karcher) mean. Requires the inputs to lie within
/// a geodesic ball of radius pi/2 of each other; otherwise the mean is
/// not well defined and a NumericalError is thrown.
inline Rotation rotation_mean(std::span<const Rotation> rotations) {
  if (rotations.empty()) {
    throw std::invalid_argument("rotation_mean: empty input");
  }
  for (std::size_t i = 0; i < rotations.size(); ++i) {
    for (std::size_t j = i + 1; j < rotations.size(); ++j) {
      if (geodesic_distance(rotations[i], rotations[j]) >= M_PI / 2.0) {
        throw NumericalError("rotation_mean: dispersion too large (pairwise distance >= pi/2)");
      }
    }
  }
  Rotation mean = rotations[0];
  for (int iter = 0; iter < 100; ++iter) {
    Vec3 delta = Vec3::Zero();
    for (const Rotation& r : rotations) {
      delta += log_so3(mean.transposed() * r);
    }
    delta /= static_cast<double>(rotations.size());
    mean = mean * exp_so3(delta);
    if (delta.norm() < 1e-10) break;
  }
  return mean;
}

inline Rotation rotation_mean(const std::vector<Rotation>& rotations) {
  return rotation_mean(std::span<const Rotation>(rotations));
}

}  // namespace mimu
