#pragma once

// Scalar types for complex-step differentiation.
//
// Every kernel in the library is templated on a scalar T. Three scalars are
// instantiated:
//   double                 plain evaluation
//   std::complex<double>   one complex-step perturbation (first derivatives)
//   Bicomplex              two commuting imaginary units, used when a
//                          complex-step derivative is itself evaluated inside
//                          a complex-step differentiated map (the spin-fitter
//                          inside the projected-force tangent)
//
// Branches in kernels are taken on re(x), never on the perturbed parts, and
// no kernel uses abs() or conj(), so perturbations propagate analytically.

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

#include <Eigen/Dense>

namespace crfc {

using Complex = std::complex<double>;

/// a + b*j with j*j = -1. The components a, b are complex numbers carrying
/// the outer perturbation unit i, which commutes with j.
///
/// Arithmetic is exact. Elementary functions use the first-order expansion
/// f(a + b j) = f(a) + j b f'(a); the dropped term is O(b^2) and b is always
/// a complex-step sized quantity (|b| <= 1e-20 relative), far below double
/// resolution.
struct Bicomplex {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};

  Bicomplex() = default;
  Bicomplex(double x) : a(x, 0.0) {}  // NOLINT(google-explicit-constructor)
  Bicomplex(int x) : a(static_cast<double>(x), 0.0) {}  // NOLINT
  Bicomplex(const Complex& x) : a(x) {}  // NOLINT
  Bicomplex(const Complex& x, const Complex& y) : a(x), b(y) {}

  Bicomplex& operator+=(const Bicomplex& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  Bicomplex& operator-=(const Bicomplex& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
  Bicomplex& operator*=(const Bicomplex& o) {
    const Complex na = a * o.a - b * o.b;
    const Complex nb = a * o.b + b * o.a;
    a = na;
    b = nb;
    return *this;
  }
  Bicomplex& operator/=(const Bicomplex& o) {
    const Complex den = o.a * o.a + o.b * o.b;
    const Complex na = (a * o.a + b * o.b) / den;
    const Complex nb = (b * o.a - a * o.b) / den;
    a = na;
    b = nb;
    return *this;
  }
};

inline Bicomplex operator+(Bicomplex x, const Bicomplex& y) { return x += y; }
inline Bicomplex operator-(Bicomplex x, const Bicomplex& y) { return x -= y; }
inline Bicomplex operator*(Bicomplex x, const Bicomplex& y) { return x *= y; }
inline Bicomplex operator/(Bicomplex x, const Bicomplex& y) { return x /= y; }
inline Bicomplex operator-(const Bicomplex& x) { return {-x.a, -x.b}; }
inline Bicomplex operator+(const Bicomplex& x) { return x; }

inline Bicomplex operator*(const Bicomplex& x, double s) { return {x.a * s, x.b * s}; }
inline Bicomplex operator*(double s, const Bicomplex& x) { return {x.a * s, x.b * s}; }
inline Bicomplex operator/(const Bicomplex& x, double s) { return {x.a / s, x.b / s}; }
inline Bicomplex operator+(const Bicomplex& x, double s) { return {x.a + s, x.b}; }
inline Bicomplex operator+(double s, const Bicomplex& x) { return {x.a + s, x.b}; }
inline Bicomplex operator-(const Bicomplex& x, double s) { return {x.a - s, x.b}; }
inline Bicomplex operator-(double s, const Bicomplex& x) { return {s - x.a, -x.b}; }
inline Bicomplex operator/(double s, const Bicomplex& x) { return Bicomplex(s) / x; }

inline bool operator==(const Bicomplex& x, const Bicomplex& y) { return x.a == y.a && x.b == y.b; }
inline bool operator!=(const Bicomplex& x, const Bicomplex& y) { return !(x == y); }

inline Bicomplex sqrt(const Bicomplex& x) {
  const Complex s = std::sqrt(x.a);
  return {s, x.b / (2.0 * s)};
}
inline Bicomplex sin(const Bicomplex& x) { return {std::sin(x.a), x.b * std::cos(x.a)}; }
inline Bicomplex cos(const Bicomplex& x) { return {std::cos(x.a), -x.b * std::sin(x.a)}; }
inline Bicomplex exp(const Bicomplex& x) {
  const Complex e = std::exp(x.a);
  return {e, x.b * e};
}
inline Bicomplex log(const Bicomplex& x) { return {std::log(x.a), x.b / x.a}; }
inline Bicomplex asin(const Bicomplex& x) {
  return {std::asin(x.a), x.b / std::sqrt(1.0 - x.a * x.a)};
}

// Real part used for branch decisions.
inline double re(double x) { return x; }
inline double re(const Complex& x) { return x.real(); }
inline double re(const Bicomplex& x) { return x.a.real(); }

/// Scalar carrying one more complex-step unit than T.
template <class T>
struct LiftTraits;
template <>
struct LiftTraits<double> {
  using type = Complex;
};
template <>
struct LiftTraits<Complex> {
  using type = Bicomplex;
};
template <class T>
using Lift = typename LiftTraits<T>::type;

inline Complex lift(double x) { return {x, 0.0}; }
inline Bicomplex lift(const Complex& x) { return Bicomplex(x); }

/// x + unit*h where unit is the new imaginary unit of Lift<T>.
inline Complex perturb(double x, double h) { return {x, h}; }
inline Bicomplex perturb(const Complex& x, double h) { return {x, Complex(h, 0.0)}; }

/// Coefficient of the outermost imaginary unit.
inline double unit_part(const Complex& x) { return x.imag(); }
inline Complex unit_part(const Bicomplex& x) { return x.b; }

/// Drops the outermost imaginary unit.
inline double base_part(const Complex& x) { return x.real(); }
inline Complex base_part(const Bicomplex& x) { return x.a; }

template <class T>
inline bool is_finite(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(x);
  } else if constexpr (std::is_same_v<T, Complex>) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  } else {
    return is_finite(x.a) && is_finite(x.b);
  }
}

template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <class T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;

/// Bilinear dot product (no conjugation), safe under complex perturbation.
template <class Derived1, class Derived2>
inline typename Derived1::Scalar sdot(const Eigen::MatrixBase<Derived1>& a,
                                      const Eigen::MatrixBase<Derived2>& b) {
  return a.cwiseProduct(b).sum();
}

/// sqrt of the sum of squares; analytic replacement for Eigen's norm().
template <class Derived>
inline typename Derived::Scalar snorm(const Eigen::MatrixBase<Derived>& a) {
  using std::sqrt;
  return sqrt(sdot(a, a));
}

/// Elementwise real part of a perturbed matrix.
template <class Derived>
inline MatX<double> real_of(const Eigen::MatrixBase<Derived>& m) {
  MatX<double> out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = re(m(i, j));
  return out;
}

}  // namespace crfc

namespace Eigen {

template <>
struct NumTraits<crfc::Bicomplex> : GenericNumTraits<double> {
  using Real = crfc::Bicomplex;
  using NonInteger = crfc::Bicomplex;
  using Nested = crfc::Bicomplex;
  using Literal = crfc::Bicomplex;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 8,
    MulCost = 24
  };
  static inline Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(std::numeric_limits<double>::max()); }
  static inline Real lowest() { return Real(std::numeric_limits<double>::lowest()); }
  static inline int digits10() { return std::numeric_limits<double>::digits10; }
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<crfc::Bicomplex, double, BinaryOp> {
  using ReturnType = crfc::Bicomplex;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, crfc::Bicomplex, BinaryOp> {
  using ReturnType = crfc::Bicomplex;
};

}  // namespace Eigen
