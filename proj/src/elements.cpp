#include "crfc/elements.hpp"

#include <array>
#include <cmath>

#include "crfc/error.hpp"

namespace crfc {

void Material::validate(ElementKind kind) const {
  if (!(E > 0.0)) throw Error(ErrorCode::ValidationError, "E must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw Error(ErrorCode::ValidationError, "nu outside (-1, 0.5)");
  if (kind == ElementKind::Beam2) {
    if (!(section.A > 0.0 && section.Iy > 0.0 && section.Iz > 0.0 && section.J > 0.0)) {
      throw Error(ErrorCode::ValidationError, "beam section constants must be positive");
    }
  } else if (kind != ElementKind::Hex8 && !(thickness > 0.0)) {
    throw Error(ErrorCode::ValidationError, "thickness must be positive");
  }
  if (!(drill_factor >= 0.0)) throw Error(ErrorCode::ValidationError, "negative drill factor");
}

int node_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::Bar2: return 2;
    case ElementKind::Cst3: return 3;
    case ElementKind::Quad4: return 4;
    case ElementKind::Hex8: return 8;
    case ElementKind::Beam2: return 2;
    case ElementKind::TriShell3: return 3;
    case ElementKind::QuadShell4: return 4;
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown element kind");
}

Regime regime_of(ElementKind kind) {
  switch (kind) {
    case ElementKind::Bar2:
    case ElementKind::Cst3:
    case ElementKind::Quad4: return Regime::Plane;
    case ElementKind::Hex8: return Regime::Solid;
    case ElementKind::Beam2:
    case ElementKind::TriShell3:
    case ElementKind::QuadShell4: return Regime::Structural;
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown element kind");
}

int dofs_per_node(Regime regime) {
  switch (regime) {
    case Regime::Plane: return 2;
    case Regime::Solid: return 3;
    case Regime::Structural: return 6;
  }
  return 0;
}

int dofs_per_node(ElementKind kind) { return dofs_per_node(regime_of(kind)); }
int translation_dim(Regime regime) { return regime == Regime::Plane ? 2 : 3; }
bool has_rotations(Regime regime) { return regime == Regime::Structural; }

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Bar2: return "bar2";
    case ElementKind::Cst3: return "cst3";
    case ElementKind::Quad4: return "quad4";
    case ElementKind::Hex8: return "hex8";
    case ElementKind::Beam2: return "beam2";
    case ElementKind::TriShell3: return "trishell3";
    case ElementKind::QuadShell4: return "quadshell4";
  }
  return "?";
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Plane: return "plane";
    case Regime::Solid: return "solid";
    case Regime::Structural: return "structural";
  }
  return "?";
}

ElementKind parse_element_kind(const std::string& name) {
  for (auto k : {ElementKind::Bar2, ElementKind::Cst3, ElementKind::Quad4, ElementKind::Hex8,
                 ElementKind::Beam2, ElementKind::TriShell3, ElementKind::QuadShell4}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::UnsupportedKind, "element kind '" + name + "'");
}

Regime parse_regime(const std::string& name) {
  for (auto r : {Regime::Plane, Regime::Solid, Regime::Structural}) {
    if (name == to_string(r)) return r;
  }
  throw Error(ErrorCode::ValidationError, "regime '" + name + "'");
}

std::vector<std::string> dof_labels(Regime regime) {
  switch (regime) {
    case Regime::Plane: return {"ux", "uy"};
    case Regime::Solid: return {"ux", "uy", "uz"};
    case Regime::Structural: return {"ux", "uy", "uz", "rx", "ry", "rz"};
  }
  return {};
}

std::vector<std::string> dof_layout(ElementKind kind) {
  const auto per_node = dof_labels(regime_of(kind));
  std::vector<std::string> out;
  for (int i = 0; i < node_count(kind); ++i) out.insert(out.end(), per_node.begin(), per_node.end());
  return out;
}

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

Eigen::Matrix3d plane_stress_d(const Material& m) {
  const double c = m.E / (1.0 - m.nu * m.nu);
  Eigen::Matrix3d d;
  d << c, c * m.nu, 0.0,
       c * m.nu, c, 0.0,
       0.0, 0.0, c * 0.5 * (1.0 - m.nu);
  return d;
}

Eigen::Matrix3d bending_d(const Material& m) {
  const double t = m.thickness;
  Material scaled = m;
  scaled.E = m.E * t * t * t / 12.0;
  return plane_stress_d(scaled);
}

Eigen::Matrix<double, 6, 6> solid_d(const Material& m) {
  const double lam = m.E * m.nu / ((1.0 + m.nu) * (1.0 - 2.0 * m.nu));
  const double mu = m.E / (2.0 * (1.0 + m.nu));
  Eigen::Matrix<double, 6, 6> d = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d(i, j) = lam;
    d(i, i) = lam + 2.0 * mu;
    d(3 + i, 3 + i) = mu;
  }
  return d;
}

// --- CST -------------------------------------------------------------------

struct TriGeom {
  double area;
  std::array<double, 3> b;  // dN/dx * 2A
  std::array<double, 3> c;  // dN/dy * 2A
};

TriGeom tri_geom(const std::vector<Vec3>& p) {
  TriGeom g{};
  const double x1 = p[0].x(), y1 = p[0].y();
  const double x2 = p[1].x(), y2 = p[1].y();
  const double x3 = p[2].x(), y3 = p[2].y();
  g.area = 0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1));
  if (!(g.area > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "triangle area not positive");
  g.b = {y2 - y3, y3 - y1, y1 - y2};
  g.c = {x3 - x2, x1 - x3, x2 - x1};
  return g;
}

// 3 x 6 membrane strain matrix of a linear triangle, DOFs (u, v) per node.
Eigen::Matrix<double, 3, 6> cst_b(const TriGeom& g) {
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  const double inv = 1.0 / (2.0 * g.area);
  for (int i = 0; i < 3; ++i) {
    b(0, 2 * i) = g.b[i] * inv;
    b(1, 2 * i + 1) = g.c[i] * inv;
    b(2, 2 * i) = g.c[i] * inv;
    b(2, 2 * i + 1) = g.b[i] * inv;
  }
  return b;
}

MatrixXd cst_stiffness(const std::vector<Vec3>& p, const Material& m) {
  const TriGeom g = tri_geom(p);
  const auto b = cst_b(g);
  return b.transpose() * plane_stress_d(m) * b * (g.area * m.thickness);
}

// --- bilinear quadrilateral ------------------------------------------------

constexpr std::array<double, 4> kQxi{-1.0, 1.0, 1.0, -1.0};
constexpr std::array<double, 4> kQeta{-1.0, -1.0, 1.0, 1.0};

// Returns dN/dx, dN/dy (4 x 2) and det J at (xi, eta).
std::pair<Eigen::Matrix<double, 4, 2>, double> q4_gradients(const std::vector<Vec3>& p, double xi,
                                                              double eta) {
  Eigen::Matrix<double, 4, 2> dn;
  for (int i = 0; i < 4; ++i) {
    dn(i, 0) = 0.25 * kQxi[i] * (1.0 + eta * kQeta[i]);
    dn(i, 1) = 0.25 * kQeta[i] * (1.0 + xi * kQxi[i]);
  }
  Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 4; ++i) {
    jac(0, 0) += dn(i, 0) * p[i].x();
    jac(0, 1) += dn(i, 0) * p[i].y();
    jac(1, 0) += dn(i, 1) * p[i].x();
    jac(1, 1) += dn(i, 1) * p[i].y();
  }
  const double det = jac.determinant();
  if (!(det > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "quadrilateral Jacobian not positive");
  const Eigen::Matrix<double, 4, 2> dx = dn * jac.inverse().transpose();
  return {dx, det};
}

MatrixXd q4_membrane(const std::vector<Vec3>& p, const Material& m) {
  MatrixXd k = MatrixXd::Zero(8, 8);
  const Eigen::Matrix3d d = plane_stress_d(m);
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      const auto [dx, det] = q4_gradients(p, xi, eta);
      Eigen::Matrix<double, 3, 8> b = Eigen::Matrix<double, 3, 8>::Zero();
      for (int i = 0; i < 4; ++i) {
        b(0, 2 * i) = dx(i, 0);
        b(1, 2 * i + 1) = dx(i, 1);
        b(2, 2 * i) = dx(i, 1);
        b(2, 2 * i + 1) = dx(i, 0);
      }
      k += b.transpose() * d * b * (det * m.thickness);
    }
  }
  return k;
}

// --- trilinear hexahedron --------------------------------------------------

constexpr std::array<double, 8> kHxi{-1, 1, 1, -1, -1, 1, 1, -1};
constexpr std::array<double, 8> kHeta{-1, -1, 1, 1, -1, -1, 1, 1};
constexpr std::array<double, 8> kHzeta{-1, -1, -1, -1, 1, 1, 1, 1};

std::pair<Eigen::Matrix<double, 8, 3>, double> hex_gradients(const std::vector<Vec3>& p, double xi,
                                                               double eta, double zeta) {
  Eigen::Matrix<double, 8, 3> dn;
  for (int i = 0; i < 8; ++i) {
    dn(i, 0) = 0.125 * kHxi[i] * (1 + eta * kHeta[i]) * (1 + zeta * kHzeta[i]);
    dn(i, 1) = 0.125 * kHeta[i] * (1 + xi * kHxi[i]) * (1 + zeta * kHzeta[i]);
    dn(i, 2) = 0.125 * kHzeta[i] * (1 + xi * kHxi[i]) * (1 + eta * kHeta[i]);
  }
  Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 8; ++i) jac += dn.row(i).transpose() * p[i].transpose();
  const double det = jac.determinant();
  if (!(det > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "hexahedron Jacobian not positive");
  const Eigen::Matrix<double, 8, 3> dx = dn * jac.inverse().transpose();
  return {dx, det};
}

MatrixXd hex8_stiffness(const std::vector<Vec3>& p, const Material& m) {
  MatrixXd k = MatrixXd::Zero(24, 24);
  const auto d = solid_d(m);
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      for (double zeta : {-kGauss, kGauss}) {
        const auto [dx, det] = hex_gradients(p, xi, eta, zeta);
        Eigen::Matrix<double, 6, 24> b = Eigen::Matrix<double, 6, 24>::Zero();
        for (int i = 0; i < 8; ++i) {
          const int c = 3 * i;
          b(0, c) = dx(i, 0);
          b(1, c + 1) = dx(i, 1);
          b(2, c + 2) = dx(i, 2);
          b(3, c) = dx(i, 1);
          b(3, c + 1) = dx(i, 0);
          b(4, c + 1) = dx(i, 2);
          b(4, c + 2) = dx(i, 1);
          b(5, c) = dx(i, 2);
          b(5, c + 2) = dx(i, 0);
        }
        k += b.transpose() * d * b * det;
      }
    }
  }
  return k;
}

// --- bar and beam ----------------------------------------------------------

MatrixXd bar_stiffness(const std::vector<Vec3>& p, const Material& m) {
  const double len = (p[1] - p[0]).head<2>().norm();
  if (!(len > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "bar length not positive");
  const double dx = (p[1].x() - p[0].x()) / len;
  const double dy = (p[1].y() - p[0].y()) / len;
  const double ka = m.E * m.thickness / len;  // thickness holds the bar area
  Eigen::Vector4d g(-dx, -dy, dx, dy);
  return ka * g * g.transpose();
}

MatrixXd beam_stiffness(const std::vector<Vec3>& p, const Material& m) {
  const double len = (p[1] - p[0]).norm();
  if (!(len > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "beam length not positive");
  const Section& s = m.section;
  const double g = m.E / (2.0 * (1.0 + m.nu));
  const double l2 = len * len;
  const double l3 = l2 * len;
  MatrixXd k = MatrixXd::Zero(12, 12);
  // axial u
  const double ea = m.E * s.A / len;
  k(0, 0) = k(6, 6) = ea;
  k(0, 6) = k(6, 0) = -ea;
  // torsion
  const double gj = g * s.J / len;
  k(3, 3) = k(9, 9) = gj;
  k(3, 9) = k(9, 3) = -gj;
  // bending in the local x-y plane: v (1, 7), theta_z (5, 11)
  const double bz = m.E * s.Iz;
  {
    const std::array<int, 4> id{1, 5, 7, 11};
    Eigen::Matrix4d kb;
    kb << 12 / l3, 6 / l2, -12 / l3, 6 / l2,
          6 / l2, 4 / len, -6 / l2, 2 / len,
          -12 / l3, -6 / l2, 12 / l3, -6 / l2,
          6 / l2, 2 / len, -6 / l2, 4 / len;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) k(id[a], id[b]) += bz * kb(a, b);
  }
  // bending in the local x-z plane: w (2, 8), theta_y (4, 10)
  const double by = m.E * s.Iy;
  {
    const std::array<int, 4> id{2, 4, 8, 10};
    Eigen::Matrix4d kb;
    kb << 12 / l3, -6 / l2, -12 / l3, -6 / l2,
          -6 / l2, 4 / len, 6 / l2, 2 / len,
          -12 / l3, 6 / l2, 12 / l3, 6 / l2,
          -6 / l2, 2 / len, 6 / l2, 4 / len;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) k(id[a], id[b]) += by * kb(a, b);
  }
  return k;
}

// --- discrete Kirchhoff plates ---------------------------------------------
//
// Plate DOFs per node: (w, theta_x, theta_y), right-handed rotations, so
// theta_x = w_,y and theta_y = -w_,x. The normal rotations are
// beta_x = Hx . U and beta_y = Hy . U, curvatures
// kappa = (beta_x,x, beta_y,y, beta_x,y + beta_y,x).

struct SideCoef {
  double a, b, c, d, e;
};

SideCoef side_coef(const Vec3& pi, const Vec3& pj) {
  const double x = pi.x() - pj.x();
  const double y = pi.y() - pj.y();
  const double l2 = x * x + y * y;
  return {-x / l2, 0.75 * x * y / l2, (0.25 * x * x - 0.5 * y * y) / l2, -y / l2,
          (0.25 * y * y - 0.5 * x * x) / l2};
}

// Derivatives (d/dxi, d/deta) of Hx and Hy for a plate with `nc` corners and
// `nc` mid-side nodes. n, dn_xi, dn_eta hold the quadratic/serendipity
// function derivatives (corners first, then mid-sides); side k joins corner k
// and corner k+1 (mod nc).
void dk_hderivs(int nc, const std::vector<SideCoef>& sc, const double* dn, double* hx, double* hy) {
  // corner i: next side m = i, previous side l = i - 1
  for (int i = 0; i < nc; ++i) {
    const int m = i;
    const int l = (i + nc - 1) % nc;
    const double nm = dn[nc + m];
    const double nl = dn[nc + l];
    hx[3 * i + 0] = 1.5 * (sc[m].a * nm - sc[l].a * nl);
    hx[3 * i + 1] = sc[m].b * nm + sc[l].b * nl;
    hx[3 * i + 2] = dn[i] - sc[m].c * nm - sc[l].c * nl;
    hy[3 * i + 0] = 1.5 * (sc[m].d * nm - sc[l].d * nl);
    hy[3 * i + 1] = -dn[i] + sc[m].e * nm + sc[l].e * nl;
    hy[3 * i + 2] = -sc[m].b * nm - sc[l].b * nl;
  }
}

MatrixXd dkt_bending(const std::vector<Vec3>& p, const Material& m) {
  const TriGeom g = tri_geom(p);
  // sides: 0 = (1,2), 1 = (2,3), 2 = (3,1)
  std::vector<SideCoef> sc{side_coef(p[0], p[1]), side_coef(p[1], p[2]), side_coef(p[2], p[0])};
  const Eigen::Matrix3d d = bending_d(m);
  const double x21 = p[1].x() - p[0].x(), y21 = p[1].y() - p[0].y();
  const double x31 = p[2].x() - p[0].x(), y31 = p[2].y() - p[0].y();
  const double two_a = 2.0 * g.area;
  MatrixXd k = MatrixXd::Zero(9, 9);
  const std::array<std::array<double, 2>, 3> pts{{{1.0 / 6, 1.0 / 6}, {2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3}}};
  for (const auto& pt : pts) {
    const double xi = pt[0], eta = pt[1];
    const double l1 = 1.0 - xi - eta;
    // corners 1..3, mid-sides (1,2), (2,3), (3,1)
    const double dxi[6] = {-(4 * l1 - 1), 4 * xi - 1, 0.0, 4 * (l1 - xi), 4 * eta, -4 * eta};
    const double deta[6] = {-(4 * l1 - 1), 0.0, 4 * eta - 1, -4 * xi, 4 * xi, 4 * (l1 - eta)};
    double hx_xi[9], hy_xi[9], hx_eta[9], hy_eta[9];
    dk_hderivs(3, sc, dxi, hx_xi, hy_xi);
    dk_hderivs(3, sc, deta, hx_eta, hy_eta);
    Eigen::Matrix<double, 3, 9> b;
    for (int j = 0; j < 9; ++j) {
      const double hx_x = (y31 * hx_xi[j] - y21 * hx_eta[j]) / two_a;
      const double hx_y = (-x31 * hx_xi[j] + x21 * hx_eta[j]) / two_a;
      const double hy_x = (y31 * hy_xi[j] - y21 * hy_eta[j]) / two_a;
      const double hy_y = (-x31 * hy_xi[j] + x21 * hy_eta[j]) / two_a;
      b(0, j) = hx_x;
      b(1, j) = hy_y;
      b(2, j) = hx_y + hy_x;
    }
    k += b.transpose() * d * b * (g.area / 3.0);
  }
  return k;
}

MatrixXd dkq_bending(const std::vector<Vec3>& p, const Material& m) {
  std::vector<SideCoef> sc;
  for (int i = 0; i < 4; ++i) sc.push_back(side_coef(p[i], p[(i + 1) % 4]));
  const Eigen::Matrix3d d = bending_d(m);
  MatrixXd k = MatrixXd::Zero(12, 12);
  // mid-side parametric positions: (1,2) (2,3) (3,4) (4,1)
  constexpr std::array<double, 4> mxi{0.0, 1.0, 0.0, -1.0};
  constexpr std::array<double, 4> meta{-1.0, 0.0, 1.0, 0.0};
  for (double xi : {-kGauss, kGauss}) {
    for (double eta : {-kGauss, kGauss}) {
      double dxi[8], deta[8];
      for (int i = 0; i < 4; ++i) {
        const double a = kQxi[i], b = kQeta[i];
        dxi[i] = 0.25 * a * (1 + eta * b) * (2 * xi * a + eta * b);
        deta[i] = 0.25 * b * (1 + xi * a) * (xi * a + 2 * eta * b);
      }
      for (int s = 0; s < 4; ++s) {
        if (mxi[s] == 0.0) {
          dxi[4 + s] = -xi * (1 + eta * meta[s]);
          deta[4 + s] = 0.5 * (1 - xi * xi) * meta[s];
        } else {
          dxi[4 + s] = 0.5 * mxi[s] * (1 - eta * eta);
          deta[4 + s] = -eta * (1 + xi * mxi[s]);
        }
      }
      // geometry is bilinear in the corners
      Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
      for (int i = 0; i < 4; ++i) {
        const double gx = 0.25 * kQxi[i] * (1 + eta * kQeta[i]);
        const double ge = 0.25 * kQeta[i] * (1 + xi * kQxi[i]);
        jac(0, 0) += gx * p[i].x();
        jac(0, 1) += gx * p[i].y();
        jac(1, 0) += ge * p[i].x();
        jac(1, 1) += ge * p[i].y();
      }
      const double det = jac.determinant();
      if (!(det > 0.0)) throw Error(ErrorCode::DegenerateGeometry, "quadrilateral Jacobian not positive");
      const Eigen::Matrix2d ji = jac.inverse();
      double hx_xi[12], hy_xi[12], hx_eta[12], hy_eta[12];
      dk_hderivs(4, sc, dxi, hx_xi, hy_xi);
      dk_hderivs(4, sc, deta, hx_eta, hy_eta);
      Eigen::Matrix<double, 3, 12> b;
      for (int j = 0; j < 12; ++j) {
        const double hx_x = ji(0, 0) * hx_xi[j] + ji(0, 1) * hx_eta[j];
        const double hx_y = ji(1, 0) * hx_xi[j] + ji(1, 1) * hx_eta[j];
        const double hy_x = ji(0, 0) * hy_xi[j] + ji(0, 1) * hy_eta[j];
        const double hy_y = ji(1, 0) * hy_xi[j] + ji(1, 1) * hy_eta[j];
        b(0, j) = hx_x;
        b(1, j) = hy_y;
        b(2, j) = hx_y + hy_x;
      }
      k += b.transpose() * d * b * det;
    }
  }
  return k;
}

// Row vector r with r . (u1, v1, u2, v2, ...) = in-plane rotation at the
// element center.
VectorXd membrane_rotation_row(const std::vector<Vec3>& p, int n) {
  VectorXd r = VectorXd::Zero(2 * n);
  if (n == 3) {
    const TriGeom g = tri_geom(p);
    for (int i = 0; i < 3; ++i) {
      r(2 * i) = -0.5 * g.c[i] / (2.0 * g.area);     // -1/2 du/dy
      r(2 * i + 1) = 0.5 * g.b[i] / (2.0 * g.area);  // +1/2 dv/dx
    }
  } else {
    const auto [dx, det] = q4_gradients(p, 0.0, 0.0);
    (void)det;
    for (int i = 0; i < 4; ++i) {
      r(2 * i) = -0.5 * dx(i, 1);
      r(2 * i + 1) = 0.5 * dx(i, 0);
    }
  }
  return r;
}

MatrixXd shell_stiffness(const std::vector<Vec3>& p, const Material& m, int n) {
  const MatrixXd km = n == 3 ? cst_stiffness(p, m) : q4_membrane(p, m);
  const MatrixXd kb = n == 3 ? dkt_bending(p, m) : dkq_bending(p, m);
  const int nd = 6 * n;
  MatrixXd k = MatrixXd::Zero(nd, nd);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k(6 * a + i, 6 * b + j) += km(2 * a + i, 2 * b + j);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k(6 * a + 2 + i, 6 * b + 2 + j) += kb(3 * a + i, 3 * b + j);
    }
  }
  // Drilling penalty on (theta_z,i - membrane rotation); vanishes on rigid modes.
  const double kd = m.drill_factor * kb.diagonal().maxCoeff();
  if (kd > 0.0) {
    const VectorXd rot = membrane_rotation_row(p, n);
    for (int i = 0; i < n; ++i) {
      VectorXd c = VectorXd::Zero(nd);
      c(6 * i + 5) = 1.0;
      for (int a = 0; a < n; ++a) {
        c(6 * a) -= rot(2 * a);
        c(6 * a + 1) -= rot(2 * a + 1);
      }
      k += kd * c * c.transpose();
    }
  }
  return k;
}

}  // namespace

MatrixXd local_stiffness(ElementKind kind, const std::vector<Vec3>& local, const Material& mat) {
  if (static_cast<int>(local.size()) != node_count(kind)) {
    throw Error(ErrorCode::InvalidArgument, "node count does not match element kind");
  }
  mat.validate(kind);
  switch (kind) {
    case ElementKind::Bar2: return bar_stiffness(local, mat);
    case ElementKind::Cst3: return cst_stiffness(local, mat);
    case ElementKind::Quad4: return q4_membrane(local, mat);
    case ElementKind::Hex8: return hex8_stiffness(local, mat);
    case ElementKind::Beam2: return beam_stiffness(local, mat);
    case ElementKind::TriShell3: return shell_stiffness(local, mat, 3);
    case ElementKind::QuadShell4: return shell_stiffness(local, mat, 4);
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown element kind");
}

MatrixXd center_shape_gradients(ElementKind kind, const std::vector<Vec3>& coords) {
  switch (kind) {
    case ElementKind::Cst3: {
      const TriGeom g = tri_geom(coords);
      MatrixXd out(3, 2);
      for (int i = 0; i < 3; ++i) {
        out(i, 0) = g.b[i] / (2.0 * g.area);
        out(i, 1) = g.c[i] / (2.0 * g.area);
      }
      return out;
    }
    case ElementKind::Quad4: return q4_gradients(coords, 0.0, 0.0).first;
    case ElementKind::Hex8: return hex_gradients(coords, 0.0, 0.0, 0.0).first;
    default:
      throw Error(ErrorCode::UnsupportedKind,
                  std::string("no deformation gradient for ") + to_string(kind));
  }
}

}  // namespace crfc
