#include "crfc/corot.hpp"

namespace crfc {

double ElementRef::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) d = std::max(d, (X[i] - X[j]).norm());
  return d;
}

ElementRef make_element_ref(ElementKind kind, FrameStrategy strategy, const Material& mat,
                            const std::vector<Vec3>& X, const std::optional<Vec3>& orient) {
  if (static_cast<int>(X.size()) != node_count(kind)) {
    throw Error(ErrorCode::InvalidArgument, "node count does not match element kind");
  }
  mat.validate(kind);
  ElementRef ref;
  ref.kind = kind;
  ref.regime = regime_of(kind);
  ref.mat = mat;
  ref.X = X;
  if (ref.regime == Regime::Plane) {
    for (auto& p : ref.X) p.z() = 0.0;
  }
  ref.frame = make_frame_context(kind, strategy, ref.X, orient);
  const ElementGlobalState c = reference_config(ref);
  const FrameResult f0 = evaluate_frame<double>(ref.frame, c.x, c.triads);
  ref.R0 = f0.R;
  for (const auto& p : ref.X) ref.xbar0.push_back(f0.R.transpose() * (p - f0.origin));
  ref.K = local_stiffness(kind, ref.xbar0, mat);
  return ref;
}

ElementGlobalState reference_config(const ElementRef& ref) {
  ElementGlobalState c;
  c.x = ref.X;
  if (ref.rotations()) c.triads.assign(ref.X.size(), Mat3::Identity());
  return c;
}

MatrixXd tangent(ForcePath path, const ElementRef& ref, const ElementGlobalState& c, double h) {
  if (path == ForcePath::S) {
    return element_jacobian(
        ref, c, [&](const ElementConfig<Complex>& p) { return force_S<Complex>(ref, p); }, h);
  }
  return element_jacobian(
      ref, c, [&](const ElementConfig<Complex>& p) { return force_SP<Complex>(ref, p); }, h);
}

Vec3 unbalanced_moment(Regime regime, const VectorXd& f, const std::vector<Vec3>& x) {
  const int dpn = dofs_per_node(regime);
  Vec3 m = Vec3::Zero();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int b = static_cast<int>(i) * dpn;
    if (regime == Regime::Plane) {
      m.z() += x[i].x() * f(b + 1) - x[i].y() * f(b);
    } else {
      m += x[i].cross(f.segment<3>(b));
      if (regime == Regime::Structural) m += f.segment<3>(b + 3);
    }
  }
  return m;
}

double strain_energy(const ElementRef& ref, const ElementGlobalState& c) {
  const auto ls = local_state<double>(ref, c);
  return 0.5 * ls.v.dot(ref.K * ls.v);
}

}  // namespace crfc
