#pragma once

// Seeded random element geometries and configurations, shared by the
// invariant checks of the verify command and the test suites.

#include <random>
#include <vector>

#include "crfc/corot.hpp"

namespace crfc {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  double uniform(double a, double b);
  int integer(int lo, int hi);  // inclusive
  Vec3 vec(double a = -1.0, double b = 1.0);
  Mat3 rotation(double max_angle = 3.1);
  /// Rotation about z (plane regime).
  Mat3 planar_rotation(double max_angle = 3.1);

  /// Undistorted-ish reference geometry of the kind, placed with a random
  /// rigid motion (in-plane for plane kinds).
  std::vector<Vec3> geometry(ElementKind kind);
  Material material(ElementKind kind);
  ElementRef element(ElementKind kind, FrameStrategy s);

  /// Rigid motion (Q, d) of the reference configuration.
  ElementGlobalState rigid(const ElementRef& ref, const Mat3& q, const Vec3& d);
  /// Rigid motion plus random nodal perturbations of relative size `strain`
  /// and nodal rotations up to `rot` radians (structural kinds).
  ElementGlobalState deformed(const ElementRef& ref, double strain, double rot, bool rigid_motion = true);

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// (kind, strategy) pairs covering every compatible combination.
std::vector<std::pair<ElementKind, FrameStrategy>> all_kind_strategies();

}  // namespace crfc
