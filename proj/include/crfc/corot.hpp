#pragma once

// Element-independent co-rotational kinematics and force paths.
//
// Global element vectors are node-major: per node the translational
// components (2 in the plane regime, 3 otherwise) followed by the moment
// components (structural regime only). Rotational variations are
// multiplicative, R_i <- exp(spin(dw)) R_i, with dw in global axes.

#include <optional>
#include <vector>

#include "crfc/csfd.hpp"
#include "crfc/elements.hpp"
#include "crfc/frames.hpp"
#include "crfc/rotkit.hpp"

namespace crfc {

/// Precomputed, configuration-independent element data.
struct ElementRef {
  ElementKind kind = ElementKind::Cst3;
  Regime regime = Regime::Plane;
  Material mat;
  FrameContext frame;
  std::vector<Vec3> X;      // reference positions
  Mat3 R0 = Mat3::Identity();
  std::vector<Vec3> xbar0;  // R0^T (X_i - o0)
  MatrixXd K;               // local stiffness

  int nodes() const { return static_cast<int>(X.size()); }
  int dpn() const { return dofs_per_node(regime); }
  int ndof() const { return nodes() * dpn(); }
  int tdim() const { return translation_dim(regime); }
  /// Dimension of the spin / moment space: 1 in the plane regime, else 3.
  int sdim() const { return regime == Regime::Plane ? 1 : 3; }
  bool rotations() const { return has_rotations(regime); }
  double diameter() const;
};

ElementRef make_element_ref(ElementKind kind, FrameStrategy strategy, const Material& mat,
                            const std::vector<Vec3>& X, const std::optional<Vec3>& orient = std::nullopt);

/// Current nodal positions and triads (triads empty for continuum kinds).
template <class T>
struct ElementConfig {
  std::vector<Vec3T<T>> x;
  std::vector<Mat3T<T>> triads;
};
using ElementGlobalState = ElementConfig<double>;

ElementGlobalState reference_config(const ElementRef& ref);

template <class T>
struct LocalStateT {
  FrameT<T> frame;
  VecX<T> v;                    // local DOF vector
  std::vector<Vec3T<T>> xbar;  // current local coordinates R^T (x_i - o)
};

namespace detail {

template <class T>
Vec3T<Lift<T>> lift3(const Vec3T<T>& v) {
  return Vec3T<Lift<T>>(lift(v(0)), lift(v(1)), lift(v(2)));
}

template <class T>
Mat3T<Lift<T>> lift33(const Mat3T<T>& m) {
  Mat3T<Lift<T>> out;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) out(i, j) = lift(m(i, j));
  return out;
}

template <class T>
ElementConfig<Lift<T>> lift_config(const ElementConfig<T>& c) {
  ElementConfig<Lift<T>> out;
  for (const auto& x : c.x) out.x.push_back(lift3<T>(x));
  for (const auto& r : c.triads) out.triads.push_back(lift33<T>(r));
  return out;
}

template <class T>
ElementConfig<T> cast_config(const ElementGlobalState& c) {
  ElementConfig<T> out;
  for (const auto& x : c.x) out.x.push_back(x.cast<T>());
  for (const auto& r : c.triads) out.triads.push_back(r.cast<T>());
  return out;
}

}  // namespace detail

/// Perturbs element DOF j of a lifted configuration by the new imaginary
/// unit times h along `dir` (global axes). Translational DOFs are additive,
/// rotational ones multiplicative.
template <class T>
void perturb_dof(ElementConfig<Lift<T>>& c, int node, bool rotational, const Vec3T<T>& dir,
                 double h) {
  using L = Lift<T>;
  const L unit = perturb(T(0.0), h);
  Vec3T<L> d;
  for (int k = 0; k < 3; ++k) d(k) = unit * lift(dir(k));
  if (!rotational) {
    c.x[node] += d;
  } else {
    c.triads[node] = exp_rotvec<L>(d) * c.triads[node];
  }
}

/// Global direction of element DOF component `comp` within a node.
inline Vec3 dof_direction(const ElementRef& ref, int comp, bool& rotational) {
  const int td = ref.tdim();
  rotational = comp >= td;
  return Vec3::Unit(rotational ? comp - td : comp);
}

template <class T>
LocalStateT<T> local_state(const ElementRef& ref, const ElementConfig<T>& c) {
  using std::acos;
  LocalStateT<T> out;
  out.frame = evaluate_frame<T>(ref.frame, c.x, c.triads);
  const Mat3T<T> rt = out.frame.R.transpose();
  const int n = ref.nodes();
  const int td = ref.tdim();
  const int dpn = ref.dpn();
  out.v.resize(ref.ndof());
  out.xbar.resize(n);
  const Mat3T<T> r0 = ref.R0.cast<T>();
  for (int i = 0; i < n; ++i) {
    out.xbar[i] = rt * (c.x[i] - out.frame.origin);
    for (int k = 0; k < td; ++k) out.v(i * dpn + k) = out.xbar[i](k) - ref.xbar0[i](k);
    if (ref.rotations()) {
      const Mat3T<T> rbar = rt * c.triads[i] * r0;
      const double cos_angle = 0.5 * (re(rbar(0, 0)) + re(rbar(1, 1)) + re(rbar(2, 2)) - 1.0);
      if (std::acos(std::clamp(cos_angle, -1.0, 1.0)) > M_PI / 2 - 0.05) {
        throw Error(ErrorCode::StepTooLarge, "local rotation beyond pi/2 - 0.05");
      }
      const Vec3T<T> th = skew_axial<T>(log_rot<T>(rbar));
      for (int k = 0; k < 3; ++k) out.v(i * dpn + td + k) = th(k);
    }
  }
  return out;
}

/// diag(R) applied to a local element vector.
template <class T>
VecX<T> rotate_to_global(const ElementRef& ref, const Mat3T<T>& R, const VecX<T>& local) {
  const int td = ref.tdim();
  const int dpn = ref.dpn();
  VecX<T> out(local.size());
  for (int i = 0; i < ref.nodes(); ++i) {
    const int b = i * dpn;
    if (td == 2) {
      out(b) = R(0, 0) * local(b) + R(0, 1) * local(b + 1);
      out(b + 1) = R(1, 0) * local(b) + R(1, 1) * local(b + 1);
    } else {
      out.template segment<3>(b) = R * local.template segment<3>(b);
    }
    if (ref.rotations()) out.template segment<3>(b + 3) = R * local.template segment<3>(b + 3);
  }
  return out;
}

template <class T>
VecX<T> local_force(const ElementRef& ref, const LocalStateT<T>& ls) {
  return ref.K.cast<T>() * ls.v;
}

/// Method S: f = diag(R) K v.
template <class T>
VecX<T> force_S(const ElementRef& ref, const ElementConfig<T>& c) {
  const LocalStateT<T> ls = local_state<T>(ref, c);
  return rotate_to_global<T>(ref, ls.frame.R, local_force<T>(ref, ls));
}

/// Spin-lever matrix (ndof x sdim) from current local coordinates.
template <class T>
MatX<T> spin_lever(const ElementRef& ref, const std::vector<Vec3T<T>>& xbar) {
  const int dpn = ref.dpn();
  MatX<T> s = MatX<T>::Zero(ref.ndof(), ref.sdim());
  for (int i = 0; i < ref.nodes(); ++i) {
    const int b = i * dpn;
    if (ref.regime == Regime::Plane) {
      s(b, 0) = -xbar[i](1);
      s(b + 1, 0) = xbar[i](0);
    } else {
      s.block(b, 0, 3, 3) = spin<T>(xbar[i]).transpose();
      if (ref.rotations()) s.block(b + 3, 0, 3, 3) = Mat3T<T>::Identity();
    }
  }
  return s;
}

/// Spin-fitter matrix (sdim x ndof): column j is the local spin of the
/// frame per unit local displacement j, obtained by a complex step on the
/// frame map one perturbation level above T.
template <class T>
MatX<T> spin_fitter(const ElementRef& ref, const ElementConfig<T>& c, const FrameT<T>& frame,
                    double h = 1e-30) {
  using L = Lift<T>;
  const int dpn = ref.dpn();
  const int sd = ref.sdim();
  MatX<T> g = MatX<T>::Zero(sd, ref.ndof());
  const ElementConfig<L> base = detail::lift_config<T>(c);
  const Mat3T<L> rt = detail::lift33<T>(frame.R).transpose();
  for (int i = 0; i < ref.nodes(); ++i) {
    for (int comp = 0; comp < dpn; ++comp) {
      bool rot = false;
      const Vec3 axis = dof_direction(ref, comp, rot);
      if (rot && !frame_uses_triads(ref.frame.strategy)) continue;
      const Vec3T<T> dir = frame.R * axis.cast<T>();
      ElementConfig<L> p = base;
      perturb_dof<T>(p, i, rot, dir, h);
      const FrameT<L> fp = evaluate_frame<L>(ref.frame, p.x, p.triads);
      const Vec3T<L> w = skew_axial<L>(Mat3T<L>(rt * fp.R));
      if (sd == 1) {
        g(0, i * dpn + comp) = unit_part(w(2)) / h;
      } else {
        for (int k = 0; k < 3; ++k) g(k, i * dpn + comp) = unit_part(w(k)) / h;
      }
    }
  }
  return g;
}

/// Method S+P: f = diag(R) (I - S G)^T K v.
template <class T>
VecX<T> force_SP(const ElementRef& ref, const ElementConfig<T>& c) {
  const LocalStateT<T> ls = local_state<T>(ref, c);
  const VecX<T> fl = local_force<T>(ref, ls);
  const MatX<T> s = spin_lever<T>(ref, ls.xbar);
  const MatX<T> g = spin_fitter<T>(ref, c, ls.frame);
  const VecX<T> moment = s.transpose() * fl;
  const VecX<T> fp = fl - g.transpose() * moment;
  return rotate_to_global<T>(ref, ls.frame.R, fp);
}

enum class ForcePath { S, SP };

/// Consistent tangent df/dx of a force path, by complex-step columns.
MatrixXd tangent(ForcePath path, const ElementRef& ref, const ElementGlobalState& c,
                 double h = 1e-50);

/// Generic complex-step Jacobian of an element map over element DOFs.
template <class F>
MatrixXd element_jacobian(const ElementRef& ref, const ElementGlobalState& c, F&& f,
                          double h = 1e-50) {
  const int dpn = ref.dpn();
  const ElementConfig<Complex> base = detail::lift_config<double>(c);
  MatrixXd jac;
  for (int i = 0; i < ref.nodes(); ++i) {
    for (int comp = 0; comp < dpn; ++comp) {
      bool rot = false;
      const Vec3 dir = dof_direction(ref, comp, rot);
      ElementConfig<Complex> p = base;
      perturb_dof<double>(p, i, rot, dir, h);
      const VecX<Complex> y = f(p);
      if (jac.size() == 0) jac.resize(y.size(), ref.ndof());
      for (Eigen::Index r = 0; r < y.size(); ++r) {
        if (!is_finite(y(r))) throw Error(ErrorCode::NonFiniteResult, "column " + std::to_string(i * dpn + comp));
        jac(r, i * dpn + comp) = y(r).imag() / h;
      }
    }
  }
  return jac;
}

/// Sum of nodal moments about the global origin, sum(x_i x n_i + m_i).
/// Plane regime returns (0, 0, mz).
Vec3 unbalanced_moment(Regime regime, const VectorXd& f, const std::vector<Vec3>& x);

/// 1/2 v^T K v.
double strain_energy(const ElementRef& ref, const ElementGlobalState& c);

}  // namespace crfc
