#pragma once

// Complex-step finite differences: df/dx = Im f(x + i h) / h.
//
// No subtraction of nearby values happens, so h can be taken far below the
// square root of machine epsilon; the default 1e-50 makes the truncation
// error O(h^2) vanish entirely. Differentiated maps must be analytic along
// the real axis and must take branches on real parts only.

#include <string>
#include <utility>

#include "crfc/error.hpp"
#include "crfc/scalar.hpp"

namespace crfc {

struct PerturbSpec {
  double h = 1e-50;
  int dim_in = 0;
  int dim_out = 0;

  void validate() const {
    if (!(h > 0.0) || h > 1e-20) {
      throw Error(ErrorCode::InvalidArgument,
                  "complex step must satisfy 0 < h <= 1e-20, got " + std::to_string(h));
    }
  }
};

/// f: Complex -> Complex, real-valued on the real axis.
template <class F>
double derivative_scalar(F&& f, double x, const PerturbSpec& spec = {}) {
  spec.validate();
  const Complex y = f(Complex(x, spec.h));
  if (!is_finite(y)) throw Error(ErrorCode::NonFiniteResult, "f(x + ih) is not finite");
  return y.imag() / spec.h;
}

/// Column j = Im F(x + i h e_j) / h. F: VecX<Complex> -> VecX<Complex>.
template <class F>
MatrixXd jacobian(F&& f, const VectorXd& x, const PerturbSpec& spec = {}) {
  spec.validate();
  const Eigen::Index n = x.size();
  VecX<Complex> xc = x.cast<Complex>();
  MatrixXd jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    xc(j) = Complex(x(j), spec.h);
    const VecX<Complex> y = f(xc);
    xc(j) = Complex(x(j), 0.0);
    if (j == 0) jac.resize(y.size(), n);
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (!is_finite(y(i))) {
        throw Error(ErrorCode::NonFiniteResult, "column " + std::to_string(j));
      }
      jac(i, j) = y(i).imag() / spec.h;
    }
  }
  if (spec.dim_out > 0 && jac.rows() != spec.dim_out) {
    throw Error(ErrorCode::InvalidArgument, "unexpected output dimension");
  }
  return jac;
}

/// Generic one-level-up Jacobian: evaluates F on Lift<T> inputs and returns
/// the unit part. Used where a derivative is needed inside a map that is
/// itself being differentiated.
template <class T, class F>
MatX<T> jacobian_lifted(F&& f, const VecX<T>& x, double h = 1e-50) {
  using L = Lift<T>;
  const Eigen::Index n = x.size();
  VecX<L> xl(n);
  for (Eigen::Index k = 0; k < n; ++k) xl(k) = lift(x(k));
  MatX<T> jac;
  for (Eigen::Index j = 0; j < n; ++j) {
    xl(j) = perturb(x(j), h);
    const VecX<L> y = f(xl);
    xl(j) = lift(x(j));
    if (j == 0) jac.resize(y.size(), n);
    for (Eigen::Index i = 0; i < y.size(); ++i) jac(i, j) = unit_part(y(i)) / h;
  }
  return jac;
}

}  // namespace crfc
