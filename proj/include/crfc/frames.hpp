#pragma once

// Element co-rotational frames. Every strategy is written once over a
// generic scalar so the spin-fitter and the tangents can be obtained by
// complex-step differentiation of the frame map itself.

#include <optional>
#include <string>
#include <vector>

#include "crfc/elements.hpp"
#include "crfc/error.hpp"
#include "crfc/rotkit.hpp"
#include "crfc/scalar.hpp"

namespace crfc {

enum class FrameStrategy { SideAlign2D, LeastSquare, PolarDecomp, SideAlign3D, BeamFrame, QuadShellFrame };

/// Model-file name ("side", "lsq", "polar", "beam", "quadshell").
const char* frame_name(FrameStrategy s);
/// "side" resolves to the 2D or 3D variant according to the element kind.
FrameStrategy parse_frame(const std::string& name, ElementKind kind);
FrameStrategy default_frame(ElementKind kind);
/// Throws IncompatibleStrategy.
void check_compatible(ElementKind kind, FrameStrategy s);
inline bool frame_uses_triads(FrameStrategy s) { return s == FrameStrategy::BeamFrame; }

template <class T>
struct FrameT {
  Mat3T<T> R = Mat3T<T>::Identity();
  Vec3T<T> origin = Vec3T<T>::Zero();
};
using FrameResult = FrameT<double>;

namespace detail {

template <class T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return Vec3T<T>(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

template <class T>
double scale_of(const Vec3T<T>& a, const Vec3T<T>& b) {
  return std::max({1.0, real_of(a).norm(), real_of(b).norm()});
}

template <class T>
Mat3T<T> cofactor(const Mat3T<T>& m) {
  Mat3T<T> c;
  c.col(0) = cross<T>(m.col(1), m.col(2));
  c.col(1) = cross<T>(m.col(2), m.col(0));
  c.col(2) = cross<T>(m.col(0), m.col(1));
  return c;  // cof(m) = det(m) * m^-T
}

template <class T>
Mat3T<T> columns(const Vec3T<T>& e1, const Vec3T<T>& e2, const Vec3T<T>& e3) {
  Mat3T<T> r;
  r.col(0) = e1;
  r.col(1) = e2;
  r.col(2) = e3;
  return r;
}

/// Rotation closest to the upper-left 2x2 block of m, embedded in 3x3.
template <class T>
Mat3T<T> planar_orthogonal_factor(const Mat3T<T>& m, ErrorCode code) {
  const T c = m(0, 0) + m(1, 1);
  const T s = m(1, 0) - m(0, 1);
  const T n2 = c * c + s * s;
  if (!(re(n2) > 0.0)) throw Error(code, "rank-deficient 2D matrix");
  using std::sqrt;
  const T n = sqrt(n2);
  Mat3T<T> r = Mat3T<T>::Identity();
  r(0, 0) = c / n;
  r(1, 1) = c / n;
  r(1, 0) = s / n;
  r(0, 1) = -s / n;
  return r;
}

/// Orthogonal polar factor of a 3x3 matrix with positive determinant by a
/// fixed number of Newton steps R <- (R + R^-T)/2.
template <class T>
Mat3T<T> orthogonal_factor(const Mat3T<T>& m, ErrorCode code) {
  const double det = real_of(m).determinant();
  if (!(det > 0.0)) throw Error(code, "determinant " + std::to_string(det));
  Mat3T<T> r = m / (snorm(m) * (1.0 / std::sqrt(3.0)));
  for (int it = 0; it < 12; ++it) {
    const Mat3T<T> c = cofactor<T>(r);
    const T d = sdot(r.col(0), c.col(0));
    r = (r + c / d) * 0.5;
  }
  const Mat3 rr = real_of(r);
  if ((rr.transpose() * rr - Mat3::Identity()).norm() > 1e-10) {
    throw Error(code, "polar iteration did not converge");
  }
  return r;
}

}  // namespace detail

template <class T>
FrameT<T> frame_side_2d(const Vec3T<T>& x1, const Vec3T<T>& x2) {
  const Vec3T<T> d = x2 - x1;
  const T l2 = d(0) * d(0) + d(1) * d(1);
  if (!(std::sqrt(re(l2)) > 1e-12 * detail::scale_of(x1, x2))) {
    throw Error(ErrorCode::DegenerateSide, "coincident side nodes");
  }
  using std::sqrt;
  const T l = sqrt(l2);
  FrameT<T> out;
  out.R(0, 0) = d(0) / l;
  out.R(1, 0) = d(1) / l;
  out.R(0, 1) = -d(1) / l;
  out.R(1, 1) = d(0) / l;
  out.origin = x1;
  return out;
}

/// xbar0: initial coordinates about the initial centroid. Origin is the
/// current centroid; R0 = I.
template <class T>
FrameT<T> frame_lsq(const std::vector<Vec3>& xbar0, const std::vector<Vec3T<T>>& x, bool planar) {
  if (x.size() < 3 || x.size() != xbar0.size()) {
    throw Error(ErrorCode::DegenerateConfiguration, "least-square frame needs at least 3 nodes");
  }
  FrameT<T> out;
  Vec3T<T> c = Vec3T<T>::Zero();
  for (const auto& xi : x) c += xi;
  c /= static_cast<double>(x.size());
  Mat3T<T> corr = Mat3T<T>::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) corr += (x[i] - c) * xbar0[i].cast<T>().transpose();
  if (planar) {
    out.R = detail::planar_orthogonal_factor<T>(corr, ErrorCode::DegenerateConfiguration);
  } else {
    out.R = detail::orthogonal_factor<T>(corr, ErrorCode::DegenerateConfiguration);
  }
  out.origin = c;
  return out;
}

/// F: deformation gradient (plane: upper 2x2 used, F33 ignored).
template <class T>
FrameT<T> frame_polar(const Mat3T<T>& f, bool planar) {
  FrameT<T> out;
  if (planar) {
    const double det = re(f(0, 0)) * re(f(1, 1)) - re(f(0, 1)) * re(f(1, 0));
    if (!(det > 0.0)) throw Error(ErrorCode::InvertedElement, "det F = " + std::to_string(det));
    // (F + cof F) / |F + cof F| is the rotation factor in 2D
    out.R = detail::planar_orthogonal_factor<T>(f, ErrorCode::InvertedElement);
  } else {
    out.R = detail::orthogonal_factor<T>(f, ErrorCode::InvertedElement);
  }
  return out;
}

template <class T>
FrameT<T> frame_side_3d(const Vec3T<T>& x1, const Vec3T<T>& x2, const Vec3T<T>& x3) {
  using std::sqrt;
  const Vec3T<T> a = x2 - x1;
  const Vec3T<T> n = detail::cross<T>(a, x3 - x1);
  const double scale = std::max(detail::scale_of(x1, x2), real_of(x3).norm());
  if (!(real_of(n).norm() > 1e-12 * scale * scale)) {
    throw Error(ErrorCode::CollinearNodes, "nodes 1-2-3 are collinear");
  }
  const Vec3T<T> e1 = a / snorm(a);
  const Vec3T<T> e3 = n / snorm(n);
  FrameT<T> out;
  out.R = detail::columns<T>(e1, detail::cross<T>(e3, e1), e3);
  out.origin = x1;
  return out;
}

/// R1, R2: nodal triads relative to the reference; r0: initial beam frame.
template <class T>
FrameT<T> frame_beam(const Vec3T<T>& x1, const Vec3T<T>& x2, const Mat3T<T>& r1,
                     const Mat3T<T>& r2, const Mat3& r0) {
  const Vec3T<T> a = x2 - x1;
  if (!(real_of(a).norm() > 1e-12 * detail::scale_of(x1, x2))) {
    throw Error(ErrorCode::DegenerateSide, "coincident beam nodes");
  }
  const Vec3T<T> e1 = a / snorm(a);
  const Vec3T<T> y0 = r0.col(1).cast<T>();
  const Vec3T<T> r = (r1 * y0 + r2 * y0) * 0.5;
  const Vec3T<T> n = detail::cross<T>(e1, r);
  if (!(real_of(n).norm() > 1e-10 * real_of(r).norm())) {
    throw Error(ErrorCode::DegenerateAuxiliary, "auxiliary vector parallel to beam axis");
  }
  const Vec3T<T> e3 = n / snorm(n);
  FrameT<T> out;
  out.R = detail::columns<T>(e1, detail::cross<T>(e3, e1), e3);
  out.origin = x1;
  return out;
}

template <class T>
FrameT<T> frame_quadshell(const Vec3T<T>& x1, const Vec3T<T>& x2, const Vec3T<T>& x3,
                          const Vec3T<T>& x4) {
  const Vec3T<T> n = detail::cross<T>(x3 - x1, x4 - x2);
  const double scale = std::max(detail::scale_of(x1, x2), detail::scale_of(x3, x4));
  if (!(real_of(n).norm() > 1e-12 * scale * scale)) {
    throw Error(ErrorCode::DegenerateDiagonals, "parallel diagonals");
  }
  const Vec3T<T> e3 = n / snorm(n);
  const Vec3T<T> t = detail::cross<T>(x4 - x1, e3);
  const Vec3T<T> e1 = t / snorm(t);
  FrameT<T> out;
  out.R = detail::columns<T>(e1, detail::cross<T>(e3, e1), e3);
  out.origin = x1;
  return out;
}

/// Initial beam frame: e1 along the axis, e2 the part of `orient` normal to
/// it (default global Z, global Y when Z is parallel to the axis).
Mat3 beam_initial_frame(const Vec3& x1, const Vec3& x2, const std::optional<Vec3>& orient);

/// Per-element data a strategy needs beyond the current configuration.
struct FrameContext {
  ElementKind kind = ElementKind::Cst3;
  FrameStrategy strategy = FrameStrategy::SideAlign2D;
  Mat3 beam_r0 = Mat3::Identity();
  std::vector<Vec3> xbar0_centroid;  // least-square fit
  MatrixXd grad0;                    // polar: dN_i/dX at the parametric center
};

FrameContext make_frame_context(ElementKind kind, FrameStrategy s, const std::vector<Vec3>& ref,
                                const std::optional<Vec3>& orient = std::nullopt);

template <class T>
FrameT<T> evaluate_frame(const FrameContext& c, const std::vector<Vec3T<T>>& x,
                         const std::vector<Mat3T<T>>& triads) {
  const bool planar = regime_of(c.kind) == Regime::Plane;
  switch (c.strategy) {
    case FrameStrategy::SideAlign2D: return frame_side_2d<T>(x[0], x[1]);
    case FrameStrategy::LeastSquare: return frame_lsq<T>(c.xbar0_centroid, x, planar);
    case FrameStrategy::PolarDecomp: {
      Mat3T<T> f = Mat3T<T>::Identity();
      const int dim = static_cast<int>(c.grad0.cols());
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) f(a, b) = T(0.0);
      for (std::size_t i = 0; i < x.size(); ++i)
        for (int a = 0; a < dim; ++a)
          for (int b = 0; b < dim; ++b) f(a, b) += x[i](a) * c.grad0(static_cast<Eigen::Index>(i), b);
      FrameT<T> out = frame_polar<T>(f, planar);
      out.origin = x[0];
      return out;
    }
    case FrameStrategy::SideAlign3D: return frame_side_3d<T>(x[0], x[1], x[2]);
    case FrameStrategy::BeamFrame: return frame_beam<T>(x[0], x[1], triads[0], triads[1], c.beam_r0);
    case FrameStrategy::QuadShellFrame: return frame_quadshell<T>(x[0], x[1], x[2], x[3]);
  }
  throw Error(ErrorCode::IncompatibleStrategy, "unknown strategy");
}

}  // namespace crfc
