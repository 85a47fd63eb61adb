#include "crfc/correction.hpp"

namespace crfc {

const char* to_string(WeightCase c) {
  switch (c) {
    case WeightCase::CaseI: return "I";
    case WeightCase::CaseII: return "II";
    case WeightCase::CaseIII: return "III";
  }
  return "?";
}

VectorXd inverse_weights(Regime regime, int nodes, WeightCase c) {
  const int dpn = dofs_per_node(regime);
  const int td = translation_dim(regime);
  if (c != WeightCase::CaseI && regime != Regime::Structural) {
    throw Error(ErrorCode::InvalidWeightCase,
                std::string("weight case ") + to_string(c) + " needs rotational DOFs");
  }
  VectorXd w = VectorXd::Ones(nodes * dpn);
  if (c == WeightCase::CaseI) return w;
  for (int i = 0; i < nodes; ++i) {
    for (int k = 0; k < dpn; ++k) {
      const bool trans = k < td;
      w(i * dpn + k) = (c == WeightCase::CaseII) != trans ? 1.0 : 0.0;
    }
  }
  return w;
}

namespace {

// Inverse or pseudo-inverse of the metric; sets `pinv` when rank deficient.
MatrixXd metric_inverse(const MatrixXd& m, int td, bool& pinv) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd sv = svd.singularValues();
  const double cut = 1e-10 * sv(0);
  pinv = false;
  for (Eigen::Index k = 0; k < sv.size(); ++k) pinv = pinv || !(sv(k) > cut);
  if (!pinv) return block_inverse<double>(m, td);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) inv(k) = 1.0 / sv(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

CorrectionResult correct(Regime regime, const VectorXd& f, const std::vector<Vec3>& x, WeightCase c) {
  CorrectionResult r;
  const int n = static_cast<int>(x.size());
  if (c == WeightCase::CaseII) {
    const auto g = correct_generic<double>(regime, f, x, c);
    r.fc = g.fc;
    r.lambda = g.lambda;
    return r;
  }
  const VectorXd winv = inverse_weights(regime, n, c);
  const MatrixXd gf = constraint_jacobian<double>(regime, x);
  const MatrixXd gw = gf * winv.asDiagonal();
  const MatrixXd minv = metric_inverse(gw * gf.transpose(), translation_dim(regime), r.pseudo_inverse);
  r.lambda = minv * (gf * f);
  r.fc = -(gw.transpose() * r.lambda);
  return r;
}

MatrixXd constraint_x_jacobian(Regime regime, const VectorXd& f, int nodes) {
  const int dpn = dofs_per_node(regime);
  MatrixXd gx = MatrixXd::Zero(constraint_rows(regime), nodes * dpn);
  for (int i = 0; i < nodes; ++i) {
    const int b = i * dpn;
    if (regime == Regime::Plane) {
      gx(2, b) = f(b + 1);
      gx(2, b + 1) = -f(b);
    } else {
      gx.block(3, b, 3, 3) = -spin<double>(f.segment<3>(b));
    }
  }
  return gx;
}

MatrixXd multiplier_x_jacobian(Regime regime, const VectorXd& lambda, int nodes) {
  const int dpn = dofs_per_node(regime);
  MatrixXd m1 = MatrixXd::Zero(nodes * dpn, nodes * dpn);
  for (int i = 0; i < nodes; ++i) {
    const int b = i * dpn;
    if (regime == Regime::Plane) {
      m1(b, b + 1) = -lambda(2);
      m1(b + 1, b) = lambda(2);
    } else {
      m1.block(b, b, 3, 3) = spin<double>(lambda.segment<3>(3));
    }
  }
  return m1;
}

MatrixXd correction_tangent(Regime regime, const VectorXd& f, const MatrixXd& K, const std::vector<Vec3>& x,
                            WeightCase c, const CorrectionResult& r) {
  const int n = static_cast<int>(x.size());
  const int dpn = dofs_per_node(regime);
  const MatrixXd gf = constraint_jacobian<double>(regime, x);
  if (c == WeightCase::CaseII) {
    // every nodal moment receives -m_unbalance / N
    const MatrixXd dm = gf.bottomRows(3) * K + constraint_x_jacobian(regime, f, n).bottomRows(3);
    MatrixXd kc = MatrixXd::Zero(f.size(), f.size());
    for (int i = 0; i < n; ++i) kc.middleRows(i * dpn + 3, 3) = -dm / static_cast<double>(n);
    return kc;
  }
  const VectorXd winv = inverse_weights(regime, n, c);
  const MatrixXd gw = gf * winv.asDiagonal();
  bool pinv = false;
  const MatrixXd minv = metric_inverse(gw * gf.transpose(), translation_dim(regime), pinv);
  const VectorXd ftot = f + r.fc;
  const MatrixXd m1 = multiplier_x_jacobian(regime, r.lambda, n);
  const MatrixXd m2 = gf * K + constraint_x_jacobian(regime, ftot, n);
  const MatrixXd proj = MatrixXd::Identity(f.size(), f.size()) - gf.transpose() * minv * gw;
  return -(winv.asDiagonal() * (proj * m1 + gf.transpose() * minv * m2));
}

MatrixXd p_linear_transpose(Regime regime, const std::vector<Vec3>& x) {
  const MatrixXd gf = constraint_jacobian<double>(regime, x);
  const MatrixXd m = gf * gf.transpose();
  return MatrixXd::Identity(gf.cols(), gf.cols()) - gf.transpose() * m.inverse() * gf;
}

}  // namespace crfc
