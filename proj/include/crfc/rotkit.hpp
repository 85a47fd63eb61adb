#pragma once

// Finite-rotation algebra on SO(3), generic over perturbable scalars.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "crfc/error.hpp"
#include "crfc/scalar.hpp"

namespace crfc {

/// Rotation vector theta = angle * axis (radians).
struct RotVec {
  Vec3 v = Vec3::Zero();
};

/// Proper orthonormal 3x3 matrix.
struct Rotation {
  Mat3 m = Mat3::Identity();
};

/// Skew matrix with spin(r) * b == r x b.
template <class T>
Mat3T<T> spin(const Vec3T<T>& r) {
  Mat3T<T> s;
  s << T(0.0), -r(2), r(1),
       r(2), T(0.0), -r(0),
       -r(1), r(0), T(0.0);
  return s;
}

/// Axial vector of the skew part of m, without checking skewness.
template <class T>
Vec3T<T> skew_axial(const Mat3T<T>& m) {
  return Vec3T<T>((m(2, 1) - m(1, 2)) * 0.5, (m(0, 2) - m(2, 0)) * 0.5,
                  (m(1, 0) - m(0, 1)) * 0.5);
}

/// Inverse of spin. Throws NotSkew when the symmetric part of m exceeds
/// 1e-10 * ||m|| (measured on real parts).
template <class T>
Vec3T<T> axial(const Mat3T<T>& m) {
  const Mat3 mr = real_of(m);
  const double sym = (0.5 * (mr + mr.transpose())).norm();
  if (sym > 1e-10 * mr.norm() && sym > 0.0) {
    throw Error(ErrorCode::NotSkew, "symmetric part " + std::to_string(sym));
  }
  return skew_axial(m);
}

/// Rodrigues formula; series coefficients below |v| = 1e-8.
template <class T>
Mat3T<T> exp_rotvec(const Vec3T<T>& v) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T theta2 = sdot(v, v);
  T a, b;
  if (re(theta2) < 1e-16) {
    a = T(1.0) - theta2 / 6.0;
    b = T(0.5) - theta2 / 24.0;
  } else {
    const T theta = sqrt(theta2);
    a = sin(theta) / theta;
    b = (T(1.0) - cos(theta)) / theta2;
  }
  const Mat3T<T> s = spin(v);
  return Mat3T<T>::Identity() + s * a + (s * s) * b;
}

inline Rotation exp_rotvec(const RotVec& v) { return Rotation{exp_rotvec<double>(v.v)}; }

/// Angle in [0, pi] and unit axis. Uses the trace/axial formulas in the
/// interior and a quaternion (Spurrier) extraction near 0 and pi. Identity
/// returns angle 0 with axis (1,0,0).
std::pair<double, Vec3> extract_angle_axis(const Mat3& r);
inline std::pair<double, Vec3> extract_angle_axis(const Rotation& r) {
  return extract_angle_axis(r.m);
}

/// Logarithm Theta = asin(tau)/(2 tau) (R - R^T), valid for angles up to
/// pi/2. Throws OutOfRange beyond pi/2 + 1e-9.
template <class T>
Mat3T<T> log_rot(const Mat3T<T>& r) {
  using std::asin;
  using std::sqrt;
  const Mat3 rr = real_of(r);
  const double cos_angle = 0.5 * (rr.trace() - 1.0);
  // angle > pi/2 + 1e-9  <=>  cos(angle) < -sin(1e-9)
  if (cos_angle < -std::sin(1e-9)) {
    throw Error(ErrorCode::OutOfRange,
                "rotation angle " + std::to_string(std::acos(std::max(-1.0, cos_angle))) +
                    " exceeds pi/2");
  }
  const Mat3T<T> d = r - r.transpose();
  const Vec3T<T> ax(d(2, 1), d(0, 2), d(1, 0));  // axial(R - R^T)
  const T tau2 = sdot(ax, ax) * 0.25;
  T coef;
  if (re(tau2) < 1e-16) {
    coef = T(0.5) + tau2 / 12.0;
  } else {
    const T tau = sqrt(tau2);
    coef = asin(tau) / (tau * 2.0);
  }
  return d * coef;
}

inline bool is_rotation(const Mat3& m, double tol = 1e-12) {
  return (m * m.transpose() - Mat3::Identity()).norm() <= tol &&
         std::abs(m.determinant() - 1.0) <= tol;
}

}  // namespace crfc
