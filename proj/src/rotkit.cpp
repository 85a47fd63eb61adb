#include "crfc/rotkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace crfc {

namespace {

// Spurrier's singularity-free quaternion extraction, scalar part first.
std::array<double, 4> quaternion_of(const Mat3& r) {
  const double tr = r.trace();
  int best = -1;
  double best_val = tr;
  for (int i = 0; i < 3; ++i) {
    if (r(i, i) > best_val) {
      best_val = r(i, i);
      best = i;
    }
  }
  std::array<double, 4> q{};
  if (best < 0) {
    q[0] = 0.5 * std::sqrt(1.0 + tr);
    const double s = 0.25 / q[0];
    q[1] = (r(2, 1) - r(1, 2)) * s;
    q[2] = (r(0, 2) - r(2, 0)) * s;
    q[3] = (r(1, 0) - r(0, 1)) * s;
  } else {
    const int i = best;
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const double qi = std::sqrt(0.5 * r(i, i) + 0.25 * (1.0 - tr));
    const double s = 0.25 / qi;
    q[1 + i] = qi;
    q[0] = (r(k, j) - r(j, k)) * s;
    q[1 + j] = (r(j, i) + r(i, j)) * s;
    q[1 + k] = (r(k, i) + r(i, k)) * s;
  }
  if (q[0] < 0.0) {
    for (double& c : q) c = -c;
  }
  return q;
}

}  // namespace

std::pair<double, Vec3> extract_angle_axis(const Mat3& r) {
  const double c = 0.5 * (r.trace() - 1.0);
  const Vec3 ax(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double s = 0.5 * ax.norm();
  const double angle = std::atan2(s, c);
  constexpr double edge = 1e-8;
  if (angle > edge && angle < M_PI - edge) {
    return {angle, ax / (2.0 * s)};
  }
  const auto q = quaternion_of(r);
  const Vec3 qv(q[1], q[2], q[3]);
  const double qn = qv.norm();
  if (qn == 0.0) {
    return {0.0, Vec3::UnitX()};
  }
  const double a = 2.0 * std::atan2(qn, q[0]);
  return {a, qv / qn};
}

}  // namespace crfc
