#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "crfc/corot.hpp"
#include "crfc/frames.hpp"
#include "test_util.hpp"

using namespace crfc;

namespace {

Mat3 embed2(double angle) { return exp_rotvec<double>(Vec3(0, 0, angle)); }

double lsq_objective(const std::vector<Vec3>& xbar0, const std::vector<Vec3>& x, const Mat3& r) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : x) c += p;
  c /= static_cast<double>(x.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (r.transpose() * (x[i] - c) - xbar0[i]).squaredNorm();
  return s;
}

}  // namespace

TEST_CASE("side alignment 2D") {
  CHECK((frame_side_2d<double>(Vec3(0, 0, 0), Vec3(1, 0, 0)).R - Mat3::Identity()).norm() == 0.0);
  const auto f = frame_side_2d<double>(Vec3(0, 0, 0), Vec3(0, 2, 0));
  CHECK((f.R.col(0) - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((f.R.col(1) - Vec3(-1, 0, 0)).norm() < 1e-15);
  const Vec3 a(0.3, -0.2, 0), b(1.4, 0.9, 0);
  const Mat3 ref = frame_side_2d<double>(a, b).R;
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = embed2(testutil::uniform(-3, 3));
    CHECK((frame_side_2d<double>(Vec3(q * a), Vec3(q * b)).R - q * ref).norm() < 1e-13);
  }
  CHECK_THROWS_AS(frame_side_2d<double>(a, a), Error);
}

TEST_CASE("least-square frame") {
  std::vector<Vec3> xbar0{Vec3(-0.5, -0.4, 0), Vec3(0.7, -0.2, 0), Vec3(-0.2, 0.6, 0)};
  CHECK((frame_lsq<double>(xbar0, xbar0, true).R - Mat3::Identity()).norm() < 1e-14);
  for (int k = 0; k < 20; ++k) {
    const double ang = testutil::uniform(-3, 3);
    const Mat3 q = embed2(ang);
    const Vec3 d = testutil::random_vec();
    std::vector<Vec3> x;
    for (const auto& p : xbar0) x.push_back(Vec3(q * p + Vec3(d.x(), d.y(), 0)));
    const Mat3 r = frame_lsq<double>(xbar0, x, true).R;
    CHECK((r - q).norm() < 1e-12);
    // explicit angle scan oracle on a deformed copy
    std::vector<Vec3> xd = x;
    for (auto& p : xd) p += Vec3(testutil::uniform(-0.05, 0.05), testutil::uniform(-0.05, 0.05), 0);
    const Mat3 rd = frame_lsq<double>(xbar0, xd, true).R;
    const double best = lsq_objective(xbar0, xd, rd);
    for (double s : {-1e-3, 1e-3}) CHECK(best <= lsq_objective(xbar0, xd, rd * embed2(s)));
    double scan_best = 1e300, scan_ang = 0;
    for (int i = 0; i < 20000; ++i) {
      const double a = -M_PI + 2 * M_PI * i / 20000.0;
      const double v = lsq_objective(xbar0, xd, embed2(a));
      if (v < scan_best) {
        scan_best = v;
        scan_ang = a;
      }
    }
    CHECK((embed2(scan_ang) - rd).norm() < 1e-3);
  }
}

TEST_CASE("polar decomposition") {
  CHECK((frame_polar<double>(Mat3::Identity(), false).R - Mat3::Identity()).norm() < 1e-14);
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = testutil::random_rotation();
    CHECK((frame_polar<double>(q, false).R - q).norm() < 1e-13);
    // F = Q U with U from an eigen-decomposition oracle
    const Mat3 v = testutil::random_rotation();
    const Mat3 u = v * Eigen::Vector3d(1.2, 0.8, 1.05).asDiagonal() * v.transpose();
    const Mat3 f = q * u;
    CHECK((frame_polar<double>(f, false).R - q).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Mat3> es(f.transpose() * f);
    const Mat3 uo = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    CHECK((f * uo.inverse() - q).norm() < 1e-10);
  }
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = embed2(testutil::uniform(-3, 3));
    Mat3 u = Mat3::Identity();
    u.topLeftCorner<2, 2>() << 1.2, 0.1, 0.1, 0.8;
    CHECK((frame_polar<double>(Mat3(q * u), true).R - q).norm() < 1e-12);
  }
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = -1;
  CHECK_THROWS_AS(frame_polar<double>(bad, true), Error);
  CHECK_THROWS_AS(frame_polar<double>(bad, false), Error);
}

TEST_CASE("side alignment 3D") {
  CHECK((frame_side_3d<double>(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)).R - Mat3::Identity()).norm() < 1e-15);
  const Vec3 a = testutil::random_vec(), b = testutil::random_vec(), c = testutil::random_vec();
  const Mat3 ref = frame_side_3d<double>(a, b, c).R;
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = testutil::random_rotation();
    const Vec3 d = testutil::random_vec();
    CHECK((frame_side_3d<double>(Vec3(q * a + d), Vec3(q * b + d), Vec3(q * c + d)).R - q * ref).norm() < 1e-13);
  }
  CHECK_THROWS_AS(frame_side_3d<double>(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)), Error);
}

TEST_CASE("beam frame") {
  const Vec3 x1(0, 0, 0), x2(2, 1, 0.5);
  const Mat3 r0 = beam_initial_frame(x1, x2, std::nullopt);
  CHECK(is_rotation(r0));
  CHECK((frame_beam<double>(x1, x2, Mat3::Identity(), Mat3::Identity(), r0).R - r0).norm() < 1e-14);
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = testutil::random_rotation();
    const Vec3 d = testutil::random_vec();
    CHECK((frame_beam<double>(Vec3(q * x1 + d), Vec3(q * x2 + d), q, q, r0).R - q * r0).norm() < 1e-13);
  }
  // r parallel to axis
  const Mat3 turn = exp_rotvec<double>(Vec3(0, 0, 0));
  const Vec3 axis_y = r0.col(1);
  CHECK_THROWS_AS(frame_beam<double>(x1, Vec3(x1 + axis_y), turn, turn, r0), Error);
  // vertical beam falls back to global Y
  const Mat3 rv = beam_initial_frame(Vec3(0, 0, 0), Vec3(0, 0, 1), std::nullopt);
  CHECK((rv.col(1) - Vec3::UnitY()).norm() < 1e-15);
}

TEST_CASE("quadrilateral shell frame") {
  const Vec3 p1(0, 0, 0), p2(1, 0, 0), p3(1, 1, 0), p4(0, 1, 0);
  const auto f = frame_quadshell<double>(p1, p2, p3, p4);
  CHECK((f.R.col(2) - Vec3::UnitZ()).norm() < 1e-15);
  CHECK((f.R - Mat3::Identity()).norm() < 1e-15);
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = testutil::random_rotation();
    CHECK((frame_quadshell<double>(Vec3(q * p1), Vec3(q * p2), Vec3(q * p3), Vec3(q * p4)).R - q * f.R).norm() < 1e-13);
  }
  const auto w = frame_quadshell<double>(p1, p2, Vec3(1, 1, 0.3), p4);
  CHECK(is_rotation(w.R, 1e-13));
  CHECK_THROWS_AS(frame_quadshell<double>(p1, p2, Vec3(2, 0, 0), Vec3(3, 0, 0)), Error);
}

TEST_CASE("strategy compatibility") {
  CHECK(parse_frame("side", ElementKind::Cst3) == FrameStrategy::SideAlign2D);
  CHECK(parse_frame("side", ElementKind::Hex8) == FrameStrategy::SideAlign3D);
  CHECK_THROWS_AS(parse_frame("beam", ElementKind::Cst3), Error);
  CHECK_THROWS_AS(parse_frame("quadshell", ElementKind::TriShell3), Error);
  CHECK_THROWS_AS(parse_frame("lsq", ElementKind::Beam2), Error);
  CHECK_THROWS_AS(parse_frame("spiral", ElementKind::Cst3), Error);
}

TEST_CASE("lsq equals polar for CST under affine deformation") {
  // The fit rotates F * sum(X X^T); it coincides with the polar factor of F
  // when the second moment of the reference triangle is isotropic.
  const double h = std::sqrt(3.0) / 2.0;
  const std::vector<Vec3> ref{Vec3(0.1, 0.2, 0), Vec3(1.1, 0.2, 0), Vec3(0.6, 0.2 + h, 0)};
  const FrameContext lsq = make_frame_context(ElementKind::Cst3, FrameStrategy::LeastSquare, ref);
  const FrameContext pol = make_frame_context(ElementKind::Cst3, FrameStrategy::PolarDecomp, ref);
  for (int k = 0; k < 20; ++k) {
    Mat3 f = Mat3::Identity();
    f.topLeftCorner<2, 2>() = embed2(testutil::uniform(-3, 3)).topLeftCorner<2, 2>() *
                              (Eigen::Matrix2d::Identity() + 0.1 * Eigen::Matrix2d::Random());
    std::vector<Vec3> x;
    for (const auto& p : ref) x.push_back(f * p + Vec3(0.5, -0.3, 0));
    const Mat3 a = evaluate_frame<double>(lsq, x, {}).R;
    const Mat3 b = evaluate_frame<double>(pol, x, {}).R;
    CHECK((a - b).norm() < 1e-10);
  }
  // non-isotropic triangle: equal under rotation plus isotropic stretch
  const std::vector<Vec3> skew{Vec3(0, 0, 0), Vec3(1.2, 0.1, 0), Vec3(0.3, 0.9, 0)};
  const FrameContext lsq2 = make_frame_context(ElementKind::Cst3, FrameStrategy::LeastSquare, skew);
  const FrameContext pol2 = make_frame_context(ElementKind::Cst3, FrameStrategy::PolarDecomp, skew);
  for (int k = 0; k < 20; ++k) {
    const Mat3 q = embed2(testutil::uniform(-3, 3));
    std::vector<Vec3> x;
    for (const auto& p : skew) x.push_back(1.05 * (q * p) + Vec3(0.5, -0.3, 0));
    CHECK((evaluate_frame<double>(lsq2, x, {}).R - evaluate_frame<double>(pol2, x, {}).R).norm() < 1e-10);
  }
}

TEST_CASE("frame maps are analytic: complex step agrees with central differences") {
  const std::vector<Vec3> ref{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0.1), Vec3(0, 1, 0),
                              Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1), Vec3(0, 1, 1)};
  struct Case {
    ElementKind kind;
    FrameStrategy s;
    int n;
  };
  for (const Case& cs : {Case{ElementKind::Hex8, FrameStrategy::PolarDecomp, 8}, Case{ElementKind::Hex8, FrameStrategy::SideAlign3D, 8},
                         Case{ElementKind::Hex8, FrameStrategy::LeastSquare, 8},
                         Case{ElementKind::QuadShell4, FrameStrategy::QuadShellFrame, 4}}) {
    std::vector<Vec3> p(ref.begin(), ref.begin() + cs.n);
    const FrameContext ctx = make_frame_context(cs.kind, cs.s, p);
    std::vector<Vec3> x = p;
    for (auto& xi : x) xi += 0.1 * testutil::random_vec();
    VectorXd flat(3 * cs.n);
    for (int i = 0; i < cs.n; ++i) flat.segment<3>(3 * i) = x[i];
    auto map = [&](const auto& v) {
      using S = typename std::decay_t<decltype(v)>::Scalar;
      std::vector<Vec3T<S>> xs;
      for (int i = 0; i < cs.n; ++i) xs.push_back(v.template segment<3>(3 * i));
      const Mat3T<S> r = evaluate_frame<S>(ctx, xs, {}).R;
      return VecX<S>(Eigen::Map<const VecX<S>>(r.data(), 9));
    };
    const MatrixXd jc = jacobian([&](const VecX<Complex>& v) { return map(v); }, flat);
    MatrixXd jf(9, flat.size());
    for (Eigen::Index j = 0; j < flat.size(); ++j) {
      VectorXd a = flat, b = flat;
      a(j) += 1e-6;
      b(j) -= 1e-6;
      jf.col(j) = (map(a) - map(b)) / 2e-6;
    }
    CHECK((jc - jf).norm() <= 1e-4 * jc.norm());
  }
}
