#include "crfc/sampling.hpp"

namespace crfc {

double Sampler::uniform(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(gen_);
}

int Sampler::integer(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(gen_);
}

Vec3 Sampler::vec(double a, double b) { return {uniform(a, b), uniform(a, b), uniform(a, b)}; }

Mat3 Sampler::rotation(double max_angle) {
  Vec3 axis = vec();
  while (axis.norm() < 1e-3) axis = vec();
  return exp_rotvec<double>(Vec3(axis.normalized() * uniform(0.0, max_angle)));
}

Mat3 Sampler::planar_rotation(double max_angle) {
  return exp_rotvec<double>(Vec3(0.0, 0.0, uniform(-max_angle, max_angle)));
}

std::vector<Vec3> Sampler::geometry(ElementKind kind) {
  const double j = 0.1;
  auto jit = [&]() { return Vec3(uniform(-j, j), uniform(-j, j), 0.0); };
  std::vector<Vec3> p;
  switch (kind) {
    case ElementKind::Bar2: p = {Vec3(0, 0, 0), Vec3(2, 0.3, 0) + jit()}; break;
    case ElementKind::Cst3:
    case ElementKind::TriShell3: p = {Vec3(0, 0, 0) + jit(), Vec3(1.5, 0.2, 0) + jit(), Vec3(0.4, 1.1, 0) + jit()}; break;
    case ElementKind::Quad4:
    case ElementKind::QuadShell4:
      p = {Vec3(0, 0, 0) + jit(), Vec3(2, 0, 0) + jit(), Vec3(2.1, 1.2, 0) + jit(), Vec3(-0.1, 1.1, 0) + jit()};
      break;
    case ElementKind::Hex8:
      for (int k = 0; k < 2; ++k) {
        p.push_back(Vec3(0, 0, k) + vec(-j, j));
        p.push_back(Vec3(1, 0, k) + vec(-j, j));
        p.push_back(Vec3(1, 1, k) + vec(-j, j));
        p.push_back(Vec3(0, 1, k) + vec(-j, j));
      }
      break;
    case ElementKind::Beam2: p = {Vec3(0, 0, 0), Vec3(2.0, 0.2, 0.1)}; break;
  }
  const bool planar = regime_of(kind) == Regime::Plane;
  const Mat3 q = planar ? planar_rotation() : rotation();
  Vec3 d = vec(-2, 2);
  if (planar) d.z() = 0.0;
  for (auto& x : p) x = q * x + d;
  return p;
}

Material Sampler::material(ElementKind kind) {
  Material m;
  m.E = uniform(500.0, 2000.0);
  m.nu = uniform(0.0, 0.4);
  m.thickness = kind == ElementKind::TriShell3 || kind == ElementKind::QuadShell4 ? 0.1 : 1.0;
  if (kind == ElementKind::Bar2) m.thickness = 0.5;
  m.section = {0.02, 3e-5, 4e-5, 5e-5};
  return m;
}

ElementRef Sampler::element(ElementKind kind, FrameStrategy s) {
  return make_element_ref(kind, s, material(kind), geometry(kind));
}

ElementGlobalState Sampler::rigid(const ElementRef& ref, const Mat3& q, const Vec3& d) {
  ElementGlobalState c = reference_config(ref);
  for (auto& x : c.x) x = q * x + d;
  for (auto& r : c.triads) r = q * r;
  return c;
}

ElementGlobalState Sampler::deformed(const ElementRef& ref, double strain, double rot, bool rigid_motion) {
  const bool planar = ref.regime == Regime::Plane;
  Mat3 q = Mat3::Identity();
  Vec3 d = Vec3::Zero();
  if (rigid_motion) {
    q = planar ? planar_rotation() : rotation();
    d = vec();
    if (planar) d.z() = 0.0;
  }
  ElementGlobalState c = rigid(ref, q, d);
  const double scale = ref.diameter() * strain;
  for (auto& x : c.x) {
    Vec3 p = vec(-scale, scale);
    if (planar) p.z() = 0.0;
    x += p;
  }
  for (auto& r : c.triads) r = exp_rotvec<double>(vec(-rot, rot)) * r;
  return c;
}

std::vector<std::pair<ElementKind, FrameStrategy>> all_kind_strategies() {
  using K = ElementKind;
  using S = FrameStrategy;
  return {{K::Bar2, S::SideAlign2D},      {K::Cst3, S::SideAlign2D},        {K::Cst3, S::LeastSquare},
          {K::Cst3, S::PolarDecomp},      {K::Quad4, S::SideAlign2D},       {K::Quad4, S::LeastSquare},
          {K::Quad4, S::PolarDecomp},     {K::Hex8, S::SideAlign3D},        {K::Hex8, S::PolarDecomp},
          {K::Hex8, S::LeastSquare},      {K::Beam2, S::BeamFrame},         {K::TriShell3, S::SideAlign3D},
          {K::QuadShell4, S::QuadShellFrame}, {K::QuadShell4, S::SideAlign3D}};
}

}  // namespace crfc
