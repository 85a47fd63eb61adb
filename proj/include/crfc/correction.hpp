#pragma once

// Weighted minimum-norm force correction restoring element self-equilibrium.
//
// With g(f, x) = g_f(x) f (force sums and moments about the global origin),
// the correction of a preliminary force f is
//   fc = -W^-1 g_f^T M^-1 g_f f,   lambda = M^-1 g_f f,   M = g_f W^-1 g_f^T.
// The plane regime uses three rows (fx, fy, mz).

#include <string>
#include <vector>

#include "crfc/elements.hpp"
#include "crfc/error.hpp"
#include "crfc/rotkit.hpp"
#include "crfc/scalar.hpp"

namespace crfc {

enum class WeightCase { CaseI, CaseII, CaseIII };

const char* to_string(WeightCase c);

struct CorrectionResult {
  VectorXd fc;      // correction force
  VectorXd lambda;  // multiplier, translational rows first
  bool pseudo_inverse = false;
};

inline int spin_dim(Regime r) { return r == Regime::Plane ? 1 : 3; }
inline int constraint_rows(Regime r) { return translation_dim(r) + spin_dim(r); }

/// Diagonal of W^-1. Throws InvalidWeightCase for CaseII/III without
/// rotational DOFs.
VectorXd inverse_weights(Regime regime, int nodes, WeightCase c);

template <class T>
MatX<T> constraint_jacobian(Regime regime, const std::vector<Vec3T<T>>& x) {
  const int td = translation_dim(regime);
  const int dpn = dofs_per_node(regime);
  const int n = static_cast<int>(x.size());
  MatX<T> g = MatX<T>::Zero(constraint_rows(regime), n * dpn);
  for (int i = 0; i < n; ++i) {
    const int b = i * dpn;
    for (int k = 0; k < td; ++k) g(k, b + k) = T(1.0);
    if (regime == Regime::Plane) {
      g(2, b) = -x[i](1);
      g(2, b + 1) = x[i](0);
    } else {
      g.block(3, b, 3, 3) = spin<T>(x[i]);
      if (regime == Regime::Structural) g.block(3, b + 3, 3, 3) = Mat3T<T>::Identity();
    }
  }
  return g;
}

template <class T>
VecX<T> constraint(Regime regime, const VecX<T>& f, const std::vector<Vec3T<T>>& x) {
  return constraint_jacobian<T>(regime, x) * f;
}

/// Inverse of a metric [[D, B], [B^T, A]] with D diagonal positive (size
/// `tdim`), through the Schur complement H = (A - B^T D^-1 B)^-1.
template <class T>
MatX<T> block_inverse(const MatX<T>& m, int tdim) {
  const int sd = static_cast<int>(m.rows()) - tdim;
  VecX<T> dinv(tdim);
  for (int k = 0; k < tdim; ++k) {
    if (!(re(m(k, k)) > 0.0)) throw Error(ErrorCode::InvalidArgument, "metric D block not positive");
    dinv(k) = T(1.0) / m(k, k);
  }
  const MatX<T> b = m.topRightCorner(tdim, sd);
  const MatX<T> a = m.bottomRightCorner(sd, sd);
  const MatX<T> dib = dinv.asDiagonal() * b;
  const MatX<T> schur = a - b.transpose() * dib;
  const MatrixXd sr = real_of(schur);
  Eigen::JacobiSVD<MatrixXd> svd(sr);
  const auto sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-13 * std::max(sv(0), real_of(m).norm()))) {
    throw Error(ErrorCode::SingularSchur, "Schur complement is singular");
  }
  const MatX<T> h = schur.inverse();
  MatX<T> out(m.rows(), m.cols());
  out.topLeftCorner(tdim, tdim) = MatX<T>(dinv.asDiagonal()) + dib * h * dib.transpose();
  out.topRightCorner(tdim, sd) = -dib * h;
  out.bottomLeftCorner(sd, tdim) = -(dib * h).transpose();
  out.bottomRightCorner(sd, sd) = h;
  return out;
}

template <class T>
struct GenericCorrection {
  VecX<T> fc;
  VecX<T> lambda;
};

namespace detail {

/// Unit null vector of the metric of a two-node element weighted on
/// translations only: the moment about the element axis.
template <class T>
VecX<T> axial_null_vector(const std::vector<Vec3T<T>>& x) {
  const Vec3T<T> d = x[1] - x[0];
  const Vec3T<T> e = d / snorm(d);
  const Vec3T<T> t(x[0](1) * e(2) - x[0](2) * e(1), x[0](2) * e(0) - x[0](0) * e(2),
                   x[0](0) * e(1) - x[0](1) * e(0));
  VecX<T> nu(6);
  nu << t, e;
  return nu / snorm(nu);
}

}  // namespace detail

/// Analytic (generic-scalar) correction used by the complex-step oracles.
/// CaseII takes the closed form; two-node elements under CaseIII use the
/// exact pseudo-inverse obtained by deflating the known null vector.
template <class T>
GenericCorrection<T> correct_generic(Regime regime, const VecX<T>& f, const std::vector<Vec3T<T>>& x,
                                     WeightCase c) {
  const int n = static_cast<int>(x.size());
  const int td = translation_dim(regime);
  const int dpn = dofs_per_node(regime);
  const VectorXd winv = inverse_weights(regime, n, c);
  const MatX<T> gf = constraint_jacobian<T>(regime, x);
  const VecX<T> g = gf * f;
  GenericCorrection<T> out;
  if (c == WeightCase::CaseII) {
    out.fc = VecX<T>::Zero(f.size());
    out.lambda = VecX<T>::Zero(g.size());
    for (int k = 0; k < 3; ++k) {
      out.lambda(3 + k) = g(3 + k) / static_cast<double>(n);
      for (int i = 0; i < n; ++i) out.fc(i * dpn + 3 + k) = -g(3 + k) / static_cast<double>(n);
    }
    return out;
  }
  const MatX<T> gw = gf * winv.cast<T>().asDiagonal();
  const MatX<T> m = gw * gf.transpose();
  MatX<T> minv;
  if (c == WeightCase::CaseIII && n == 2) {
    const VecX<T> nu = detail::axial_null_vector<T>(x);
    const MatX<T> nn = nu * nu.transpose();
    minv = MatX<T>((m + nn).inverse()) - nn;
  } else {
    minv = block_inverse<T>(m, td);
  }
  out.lambda = minv * g;
  out.fc = -(gw.transpose() * out.lambda);
  return out;
}

/// Correction in double precision. A rank-deficient metric (singular values
/// below 1e-10 of the largest) is inverted by SVD pseudo-inverse and flagged.
CorrectionResult correct(Regime regime, const VectorXd& f, const std::vector<Vec3>& x, WeightCase c);

/// d(fc)/dx given K = df/dx of the preliminary force.
MatrixXd correction_tangent(Regime regime, const VectorXd& f, const MatrixXd& K, const std::vector<Vec3>& x,
                            WeightCase c, const CorrectionResult& r);

/// I - g_f^T (g_f g_f^T)^-1 g_f, so that CaseI gives f + fc = P^T f.
MatrixXd p_linear_transpose(Regime regime, const std::vector<Vec3>& x);

/// Partial derivative of g(f, x) in x at fixed f (moment rows only).
MatrixXd constraint_x_jacobian(Regime regime, const VectorXd& f, int nodes);

/// Derivative of g_f^T lambda in x at fixed lambda.
MatrixXd multiplier_x_jacobian(Regime regime, const VectorXd& lambda, int nodes);

}  // namespace crfc
