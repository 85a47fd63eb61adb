#include "crfc/frames.hpp"

namespace crfc {

const char* frame_name(FrameStrategy s) {
  switch (s) {
    case FrameStrategy::SideAlign2D:
    case FrameStrategy::SideAlign3D: return "side";
    case FrameStrategy::LeastSquare: return "lsq";
    case FrameStrategy::PolarDecomp: return "polar";
    case FrameStrategy::BeamFrame: return "beam";
    case FrameStrategy::QuadShellFrame: return "quadshell";
  }
  return "?";
}

FrameStrategy parse_frame(const std::string& name, ElementKind kind) {
  FrameStrategy s;
  if (name == "side") {
    s = regime_of(kind) == Regime::Plane ? FrameStrategy::SideAlign2D : FrameStrategy::SideAlign3D;
  } else if (name == "lsq") {
    s = FrameStrategy::LeastSquare;
  } else if (name == "polar") {
    s = FrameStrategy::PolarDecomp;
  } else if (name == "beam") {
    s = FrameStrategy::BeamFrame;
  } else if (name == "quadshell") {
    s = FrameStrategy::QuadShellFrame;
  } else {
    throw Error(ErrorCode::IncompatibleStrategy, "unknown frame '" + name + "'");
  }
  check_compatible(kind, s);
  return s;
}

FrameStrategy default_frame(ElementKind kind) {
  switch (kind) {
    case ElementKind::Bar2:
    case ElementKind::Cst3:
    case ElementKind::Quad4: return FrameStrategy::SideAlign2D;
    case ElementKind::Hex8:
    case ElementKind::TriShell3: return FrameStrategy::SideAlign3D;
    case ElementKind::Beam2: return FrameStrategy::BeamFrame;
    case ElementKind::QuadShell4: return FrameStrategy::QuadShellFrame;
  }
  return FrameStrategy::SideAlign3D;
}

void check_compatible(ElementKind kind, FrameStrategy s) {
  bool ok = false;
  switch (s) {
    case FrameStrategy::SideAlign2D: ok = regime_of(kind) == Regime::Plane; break;
    case FrameStrategy::LeastSquare:
    case FrameStrategy::PolarDecomp:
      ok = kind == ElementKind::Cst3 || kind == ElementKind::Quad4 || kind == ElementKind::Hex8;
      break;
    case FrameStrategy::SideAlign3D:
      ok = kind == ElementKind::Hex8 || kind == ElementKind::TriShell3 ||
           kind == ElementKind::QuadShell4;
      break;
    case FrameStrategy::BeamFrame: ok = kind == ElementKind::Beam2; break;
    case FrameStrategy::QuadShellFrame: ok = kind == ElementKind::QuadShell4; break;
  }
  if (!ok) {
    throw Error(ErrorCode::IncompatibleStrategy,
                std::string(frame_name(s)) + " frame cannot be used with " + to_string(kind));
  }
}

Mat3 beam_initial_frame(const Vec3& x1, const Vec3& x2, const std::optional<Vec3>& orient) {
  const Vec3 a = x2 - x1;
  if (!(a.norm() > 0.0)) throw Error(ErrorCode::DegenerateSide, "coincident beam nodes");
  const Vec3 e1 = a.normalized();
  Vec3 v = orient.value_or(Vec3::UnitZ());
  if (e1.cross(v).norm() < 1e-8 * v.norm()) {
    if (orient) throw Error(ErrorCode::DegenerateAuxiliary, "orientation vector parallel to axis");
    v = Vec3::UnitY();
  }
  const Vec3 e2 = (v - v.dot(e1) * e1).normalized();
  Mat3 r;
  r.col(0) = e1;
  r.col(1) = e2;
  r.col(2) = e1.cross(e2);
  return r;
}

FrameContext make_frame_context(ElementKind kind, FrameStrategy s, const std::vector<Vec3>& ref,
                                const std::optional<Vec3>& orient) {
  check_compatible(kind, s);
  FrameContext c;
  c.kind = kind;
  c.strategy = s;
  if (s == FrameStrategy::BeamFrame) c.beam_r0 = beam_initial_frame(ref[0], ref[1], orient);
  if (s == FrameStrategy::LeastSquare) {
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : ref) centroid += p;
    centroid /= static_cast<double>(ref.size());
    for (const auto& p : ref) c.xbar0_centroid.push_back(p - centroid);
  }
  if (s == FrameStrategy::PolarDecomp) c.grad0 = center_shape_gradients(kind, ref);
  return c;
}

}  // namespace crfc
