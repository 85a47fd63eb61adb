#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "crfc/corot.hpp"
#include "crfc/sampling.hpp"

using namespace crfc;

namespace {

Sampler& sampler() {
  static Sampler s(7);
  return s;
}

VectorXd flatten(const ElementRef& ref, const ElementGlobalState& c) {
  const int dpn = ref.dpn();
  VectorXd u = VectorXd::Zero(ref.ndof());
  for (int i = 0; i < ref.nodes(); ++i)
    for (int k = 0; k < ref.tdim(); ++k) u(i * dpn + k) = c.x[i](k) - ref.X[i](k);
  return u;
}

// Central real difference of a force path over element DOFs.
MatrixXd central_difference(const ElementRef& ref, const ElementGlobalState& c, ForcePath path, double step) {
  const int dpn = ref.dpn();
  MatrixXd k(ref.ndof(), ref.ndof());
  auto eval = [&](const ElementGlobalState& s) {
    return path == ForcePath::S ? force_S<double>(ref, s) : force_SP<double>(ref, s);
  };
  for (int i = 0; i < ref.nodes(); ++i) {
    for (int comp = 0; comp < dpn; ++comp) {
      ElementGlobalState a = c, b = c;
      if (comp < ref.tdim()) {
        a.x[i](comp) += step;
        b.x[i](comp) -= step;
      } else {
        const Vec3 w = Vec3::Unit(comp - ref.tdim()) * step;
        a.triads[i] = exp_rotvec<double>(w) * c.triads[i];
        b.triads[i] = exp_rotvec<double>(Vec3(-w)) * c.triads[i];
      }
      k.col(i * dpn + comp) = (eval(a) - eval(b)) / (2 * step);
    }
  }
  return k;
}

}  // namespace

TEST_CASE("local state vanishes at the reference and under rigid motion") {
  for (auto [kind, s] : all_kind_strategies()) {
    CAPTURE(to_string(kind));
    CAPTURE(frame_name(s));
    const ElementRef ref = sampler().element(kind, s);
    CHECK(local_state<double>(ref, reference_config(ref)).v.norm() < 1e-13);
    for (int k = 0; k < 10; ++k) {
      const bool planar = ref.regime == Regime::Plane;
      const Mat3 q = planar ? sampler().planar_rotation() : sampler().rotation();
      Vec3 d = sampler().vec();
      if (planar) d.z() = 0;
      const auto c = sampler().rigid(ref, q, d);
      CHECK(local_state<double>(ref, c).v.norm() < 1e-10);
      CHECK(force_S<double>(ref, c).norm() <= 1e-9 * ref.mat.E * ref.diameter());
      CHECK(force_SP<double>(ref, c).norm() <= 1e-9 * ref.mat.E * ref.diameter());
    }
  }
}

TEST_CASE("stretched bar") {
  Material m;
  m.E = 10.0;
  m.thickness = 2.0;  // bar area
  const ElementRef ref = make_element_ref(ElementKind::Bar2, FrameStrategy::SideAlign2D, m,
                                          {Vec3(0, 0, 0), Vec3(4, 0, 0)});
  ElementGlobalState c = reference_config(ref);
  c.x[1].x() += 0.1;
  const auto ls = local_state<double>(ref, c);
  CHECK(std::abs(ls.v(2) - 0.1) < 1e-15);
  CHECK(std::abs(ls.v(3)) < 1e-15);
  VectorXd f = force_S<double>(ref, c);
  CHECK(std::abs(f(2) - 10.0 * 2.0 * 0.1 / 4.0) < 1e-13);
  CHECK(std::abs(f(0) + f(2)) < 1e-13);
  // rotate the stretched bar by 30 degrees about node 1
  const Mat3 q = exp_rotvec<double>(Vec3(0, 0, M_PI / 6));
  ElementGlobalState r = c;
  for (auto& x : r.x) x = q * x;
  f = force_S<double>(ref, r);
  const Vec3 e = q.col(0);
  CHECK(std::abs(f(2) - 0.5 * e.x()) < 1e-13);
  CHECK(std::abs(f(3) - 0.5 * e.y()) < 1e-13);
  // the two-node bar needs no projection
  CHECK((force_SP<double>(ref, r) - force_S<double>(ref, r)).norm() < 1e-13);
}

TEST_CASE("translational balance of the preliminary force") {
  for (auto [kind, s] : all_kind_strategies()) {
    CAPTURE(to_string(kind));
    const ElementRef ref = sampler().element(kind, s);
    for (int k = 0; k < 10; ++k) {
      const auto c = sampler().deformed(ref, 0.05, 0.2);
      const VectorXd f = force_S<double>(ref, c);
      Vec3 sum = Vec3::Zero();
      for (int i = 0; i < ref.nodes(); ++i)
        for (int a = 0; a < ref.tdim(); ++a) sum(a) += f(i * ref.dpn() + a);
      CHECK(sum.norm() <= 1e-12 * f.norm());
    }
  }
}

TEST_CASE("bi-orthogonality and moment balance of the projected force") {
  for (auto [kind, s] : all_kind_strategies()) {
    CAPTURE(to_string(kind));
    CAPTURE(frame_name(s));
    const ElementRef ref = sampler().element(kind, s);
    for (int k = 0; k < 10; ++k) {
      const auto c = sampler().deformed(ref, 0.05, 0.2);
      const auto ls = local_state<double>(ref, c);
      const MatrixXd sb = spin_lever<double>(ref, ls.xbar);
      const MatrixXd gb = spin_fitter<double>(ref, c, ls.frame);
      CHECK((gb * sb - MatrixXd::Identity(ref.sdim(), ref.sdim())).norm() < 1e-8);
      const VectorXd fl = ref.K * ls.v;
      const VectorXd fp = fl - gb.transpose() * (sb.transpose() * fl);
      CHECK((sb.transpose() * fp).norm() <= 1e-9 * std::max(1.0, fl.norm() * ref.diameter()));
      // projected global force is moment balanced
      const VectorXd f = force_SP<double>(ref, c);
      CHECK(unbalanced_moment(ref.regime, f, c.x).norm() <= 1e-9 * std::max(1.0, f.norm() * ref.diameter()));
    }
  }
}

TEST_CASE("spin-fitter is invariant under superposed rigid rotation") {
  for (auto [kind, s] : all_kind_strategies()) {
    CAPTURE(to_string(kind));
    const ElementRef ref = sampler().element(kind, s);
    const auto c = sampler().deformed(ref, 0.05, 0.2);
    const auto ls = local_state<double>(ref, c);
    const MatrixXd g1 = spin_fitter<double>(ref, c, ls.frame);
    const Mat3 q = ref.regime == Regime::Plane ? sampler().planar_rotation() : sampler().rotation();
    ElementGlobalState r = c;
    for (auto& x : r.x) x = q * x;
    for (auto& t : r.triads) t = q * t;
    const auto lr = local_state<double>(ref, r);
    const MatrixXd g2 = spin_fitter<double>(ref, r, lr.frame);
    CHECK((g1 - g2).norm() < 1e-8 * std::max(1.0, g1.norm()));
  }
}

TEST_CASE("continuum projected force is the strain-energy gradient") {
  for (auto [kind, s] : all_kind_strategies()) {
    if (regime_of(kind) == Regime::Structural) continue;
    CAPTURE(to_string(kind));
    CAPTURE(frame_name(s));
    const ElementRef ref = sampler().element(kind, s);
    for (int k = 0; k < 5; ++k) {
      const auto c = sampler().deformed(ref, 0.05, 0.0);
      const MatrixXd grad = element_jacobian(ref, c, [&](const ElementConfig<Complex>& p) {
        const auto ls = local_state<Complex>(ref, p);
        VecX<Complex> e(1);
        e(0) = sdot(ls.v, VecX<Complex>(ref.K.cast<Complex>() * ls.v)) * 0.5;
        return e;
      });
      const VectorXd f = force_SP<double>(ref, c);
      CHECK((grad.transpose() - f).norm() <= 1e-9 * f.norm());
    }
  }
}

TEST_CASE("tangents: symmetry, linear limit, finite-difference agreement") {
  for (auto [kind, s] : all_kind_strategies()) {
    CAPTURE(to_string(kind));
    CAPTURE(frame_name(s));
    const ElementRef ref = sampler().element(kind, s);
    // small-displacement limit equals the linear stiffness in global axes
    const ElementGlobalState c0 = reference_config(ref);
    const MatrixXd k0 = tangent(ForcePath::S, ref, c0);
    MatrixXd t = MatrixXd::Zero(ref.ndof(), ref.ndof());
    for (int i = 0; i < ref.nodes(); ++i) {
      const int dpn = ref.dpn();
      t.block(i * dpn, i * dpn, ref.tdim(), ref.tdim()) = ref.R0.topLeftCorner(ref.tdim(), ref.tdim());
      if (ref.rotations()) t.block(i * dpn + 3, i * dpn + 3, 3, 3) = ref.R0;
    }
    const MatrixXd klin = t * ref.K * t.transpose();
    CHECK((k0 - klin).norm() <= 1e-6 * klin.norm());
    for (int k = 0; k < 3; ++k) {
      const auto c = sampler().deformed(ref, 0.03, 0.15);
      for (ForcePath path : {ForcePath::S, ForcePath::SP}) {
        const MatrixXd kc = tangent(path, ref, c);
        const MatrixXd kf = central_difference(ref, c, path, 1e-6);
        CHECK((kc - kf).norm() <= 1e-4 * kc.norm());
        if (path == ForcePath::SP && ref.regime != Regime::Structural) {
          CHECK((kc - kc.transpose()).norm() <= 1e-8 * kc.norm());
        }
      }
    }
  }
}

TEST_CASE("CST with polar frame: no unbalanced moment, S equals S+P") {
  const ElementRef ref = sampler().element(ElementKind::Cst3, FrameStrategy::PolarDecomp);
  for (int k = 0; k < 20; ++k) {
    const auto c = sampler().deformed(ref, 0.1, 0.0);
    const VectorXd fs = force_S<double>(ref, c);
    CHECK(unbalanced_moment(ref.regime, fs, c.x).norm() <= 1e-10 * std::max(1.0, fs.norm() * ref.diameter()));
    CHECK((force_SP<double>(ref, c) - fs).norm() <= 1e-10 * std::max(1.0, fs.norm()));
  }
}

TEST_CASE("un-rotated frames reproduce the linear force") {
  // side-aligned CST: node 2 moves along side 1-2, node 3 anywhere
  Material m;
  m.E = 100;
  m.nu = 0.2;
  const ElementRef ref = make_element_ref(ElementKind::Cst3, FrameStrategy::SideAlign2D, m,
                                          {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0.2, 0.8, 0)});
  ElementGlobalState c = reference_config(ref);
  c.x[1].x() += 0.05;
  c.x[2] += Vec3(0.03, -0.02, 0);
  CHECK((force_S<double>(ref, c) - ref.K * flatten(ref, c)).norm() < 1e-10 * ref.K.norm());
  // shell with fixed nodes and rotated triads: f = K v with v the rotation vectors
  Material ms;
  ms.E = 1000;
  ms.nu = 0.3;
  ms.thickness = 0.1;
  const ElementRef sh = make_element_ref(ElementKind::TriShell3, FrameStrategy::SideAlign3D, ms,
                                         {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)});
  ElementGlobalState cs = reference_config(sh);
  VectorXd v = VectorXd::Zero(18);
  for (int i = 0; i < 3; ++i) {
    const Vec3 th(0.01 * (i + 1), -0.02, 0.015 * i);
    cs.triads[i] = exp_rotvec<double>(th);
    v.segment<3>(6 * i + 3) = th;
  }
  CHECK((force_S<double>(sh, cs) - sh.K * v).norm() < 1e-10 * sh.K.norm());
}

TEST_CASE("unbalanced moment") {
  std::vector<Vec3> x{Vec3(1, 0, 0), Vec3(3, 0, 0)};
  CHECK(unbalanced_moment(Regime::Solid, VectorXd::Zero(6), x).norm() == 0.0);
  VectorXd f(6);
  f << -2, 0, 0, 2, 0, 0;
  CHECK(unbalanced_moment(Regime::Solid, f, x).norm() == 0.0);
  VectorXd one(3);
  one << 0, 0, 1;
  CHECK((unbalanced_moment(Regime::Solid, one, {Vec3(1, 0, 0)}) - Vec3(0, -1, 0)).norm() == 0.0);
}

TEST_CASE("large local rotation is rejected as a recoverable step error") {
  const ElementRef ref = sampler().element(ElementKind::Beam2, FrameStrategy::BeamFrame);
  ElementGlobalState c = reference_config(ref);
  c.triads[0] = exp_rotvec<double>(Vec3(ref.R0.col(0) * 1.6));
  c.triads[1] = exp_rotvec<double>(Vec3(ref.R0.col(0) * -1.6));
  try {
    (void)local_state<double>(ref, c);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepTooLarge);
  }
}
