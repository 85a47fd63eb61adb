#include "crfc/bench.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace crfc {

namespace {

using K = ElementKind;
using F = FrameStrategy;

// Structured lattice helper: node ids keyed by integer grid coordinates.
struct Lattice {
  std::map<std::pair<int, int>, int> id;
  Model* m;
  std::function<Vec3(int, int)> place;

  int node(int i, int j) {
    auto it = id.find({i, j});
    if (it != id.end()) return it->second;
    const int n = static_cast<int>(m->nodes.size());
    m->nodes.push_back(place(i, j));
    id[{i, j}] = n;
    return n;
  }
  int at(int i, int j) const { return id.at({i, j}); }
};

ElementSpec make_element(K kind, std::vector<int> nodes, const Material& mat) {
  ElementSpec e;
  e.kind = kind;
  e.nodes = std::move(nodes);
  e.mat = mat;
  e.frame = default_frame(kind);
  return e;
}

// Quad cell (counter-clockwise a, b, c, d) as one quad or two triangles.
void add_cell(Model& m, K kind, int a, int b, int c, int d, const Material& mat) {
  if (kind == K::Quad4 || kind == K::QuadShell4) {
    m.elements.push_back(make_element(kind, {a, b, c, d}, mat));
  } else {
    m.elements.push_back(make_element(kind, {a, b, c}, mat));
    m.elements.push_back(make_element(kind, {a, c, d}, mat));
  }
}

void clamp(Model& m, int node) {
  for (int d = 0; d < m.dpn(); ++d) m.fixed.push_back({node, d, 0.0});
}

// Plane angle frame: clamped vertical leg, horizontal leg, distributed
// horizontal load on the free edge.
Benchmark plane_angle_frame(const BenchOptions& opt) {
  const K kind = opt.kind.value_or(K::Cst3);
  if (kind != K::Cst3 && kind != K::Quad4) throw Error(ErrorCode::InvalidArgument, "plane-angle-frame uses cst3 or quad4");
  Benchmark b;
  b.name = "plane-angle-frame";
  Model& m = b.model;
  m.regime = Regime::Plane;
  Material mat;
  mat.E = 3e7;
  mat.nu = 0.3;
  mat.thickness = 1.0;
  const double h = 0.5;  // lattice spacing; legs are 10 long and 1 wide
  Lattice lat{{}, &m, [&](int i, int j) { return Vec3(i * h, j * h, 0.0); }};
  auto inside = [](int i, int j) { return i < 2 || j >= 18; };  // cell (i, j) lower-left
  for (int j = 0; j < 20; ++j)
    for (int i = 0; i < 20; ++i)
      if (inside(i, j))
        add_cell(m, kind, lat.node(i, j), lat.node(i + 1, j), lat.node(i + 1, j + 1), lat.node(i, j + 1), mat);
  for (int i = 0; i <= 2; ++i) clamp(m, lat.at(i, 0));
  const double total = 4e4;
  for (int j = 18; j < 20; ++j) m.edge_loads.push_back({lat.at(20, j), lat.at(20, j + 1), Vec3(total / 1.0, 0, 0)});
  m.monitors = {{lat.at(20, 20), 1}, {lat.at(20, 20), 0}};
  b.steps = 20;
  b.methods = {Method::S, Method::SP, Method::SC1};
  b.frames = {F::SideAlign2D, F::LeastSquare, F::PolarDecomp};
  return b;
}

// Solid cantilever along z, 2 x 2 x 5 Hex8, corner load at the free end.
Benchmark spatial_cantilever(const BenchOptions&) {
  Benchmark b;
  b.name = "spatial-cantilever";
  Model& m = b.model;
  m.regime = Regime::Solid;
  Material mat;
  mat.E = 1e6;
  mat.nu = 0.3;
  const int nx = 2, ny = 2, nz = 5;
  const double wx = 1.0, wy = 1.0, len = 10.0;
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.nodes.push_back(Vec3(wx * i / nx, wy * j / ny, len * k / nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        m.elements.push_back(make_element(K::Hex8,
                                          {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k),
                                           id(i, j, k + 1), id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1),
                                           id(i, j + 1, k + 1)},
                                          mat));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) clamp(m, id(i, j, 0));
  const int corner = id(nx, ny, nz);
  NodalLoad l;
  l.node = corner;
  l.vector = Eigen::Vector3d(-1000, 200, 200);
  m.loads.push_back(l);
  m.monitors = {{corner, 0}, {corner, 1}, {corner, 2}};
  b.steps = 20;
  b.methods = {Method::S, Method::SP, Method::SC1};
  b.frames = {F::SideAlign3D, F::PolarDecomp};
  return b;
}

// Three perpendicular legs of length 1, four Beam2 each.
Benchmark spatial_angle_frame(const BenchOptions&) {
  Benchmark b;
  b.name = "spatial-angle-frame";
  Model& m = b.model;
  m.regime = Regime::Structural;
  Material mat;
  // square section of side 0.05; EI = 8.33
  const double side = 0.05;
  mat.E = 1.6e7;
  mat.nu = 0.3;
  mat.section = {side * side, std::pow(side, 4) / 12.0, std::pow(side, 4) / 12.0, 0.1406 * std::pow(side, 4)};
  const Vec3 corners[] = {Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(1, 1, 1)};
  m.nodes.push_back(corners[0]);
  for (int leg = 0; leg < 3; ++leg) {
    for (int k = 1; k <= 4; ++k) {
      m.nodes.push_back(corners[leg] + (corners[leg + 1] - corners[leg]) * (k / 4.0));
      const int n = static_cast<int>(m.nodes.size());
      m.elements.push_back(make_element(K::Beam2, {n - 2, n - 1}, mat));
    }
  }
  clamp(m, 0);
  const int tip = static_cast<int>(m.nodes.size()) - 1;
  NodalLoad l;
  l.node = tip;
  l.vector = VectorXd::Zero(6);
  l.vector.head<3>() = Vec3(-5, 0, -5);
  m.loads.push_back(l);
  m.monitors = {{tip, 0}, {tip, 1}, {tip, 2}};
  b.steps = 20;
  b.methods = all_methods();
  b.frames = {F::BeamFrame};
  return b;
}

// Right-angle strip frame (legs 240, height 30, thickness 0.6), clamped at
// the foot, in-plane tip load with a constant out-of-plane perturbation.
Benchmark l_shaped_frame(const BenchOptions& opt) {
  const K kind = opt.kind.value_or(K::QuadShell4);
  if (kind != K::QuadShell4 && kind != K::TriShell3)
    throw Error(ErrorCode::InvalidArgument, "l-shaped-frame uses quadshell4 or trishell3");
  Benchmark b;
  b.name = "l-shaped-frame";
  Model& m = b.model;
  m.regime = Regime::Structural;
  Material mat;
  mat.E = 71240;
  mat.nu = 0.31;
  mat.thickness = 0.6;
  // the default drilling spring lets nodal drilling rotations drift past the
  // local rotation limit once the legs buckle
  mat.drill_factor = 1e-3;
  // 15 x 15 cells; node ids keyed by position
  std::map<std::pair<int, int>, int> id;
  auto node = [&](double x, double y) {
    const std::pair<int, int> key{static_cast<int>(std::lround(x * 2)), static_cast<int>(std::lround(y * 2))};
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    const int n = static_cast<int>(m.nodes.size());
    m.nodes.push_back(Vec3(x, y, 0.0));
    id[key] = n;
    return n;
  };
  const double xs_v[] = {0, 15, 30};
  for (int j = 0; j < 14; ++j)
    for (int i = 0; i < 2; ++i)
      add_cell(m, kind, node(xs_v[i], 15.0 * j), node(xs_v[i + 1], 15.0 * j), node(xs_v[i + 1], 15.0 * (j + 1)),
               node(xs_v[i], 15.0 * (j + 1)), mat);
  // corner block and horizontal leg: y in {210, 225, 240}, x in {0, 15, ..., 240}
  std::vector<double> xs;
  for (double x = 0; x <= 240; x += 15) xs.push_back(x);
  const double ys[] = {210, 225, 240};
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    for (int j = 0; j < 2; ++j)
      add_cell(m, kind, node(xs[i], ys[j]), node(xs[i + 1], ys[j]), node(xs[i + 1], ys[j + 1]), node(xs[i], ys[j + 1]),
               mat);
  for (double x : xs_v) clamp(m, node(x, 0));
  const double pmax = 2.0;
  for (int j = 0; j < 2; ++j) {
    const int a = node(240, ys[j]), c = node(240, ys[j + 1]);
    m.edge_loads.push_back({a, c, Vec3(-pmax / 30.0, 0, 0)});
    m.edge_loads.push_back({a, c, Vec3(0, 0, 1e-3 / 30.0), true});
  }
  const int tip = node(240, 225);
  m.monitors = {{tip, 2}, {tip, 0}, {tip, 1}};
  b.steps = 400;
  b.methods = all_methods();
  b.frames = {default_frame(kind)};
  return b;
}

// Pre-twisted strip: length 12, width 1.1, thickness 0.05, twisted by 90
// degrees, 4 x 24 QuadShell4, tip load in z spread over the free edge.
Benchmark pretwisted_beam(const BenchOptions&) {
  Benchmark b;
  b.name = "pretwisted-beam";
  Model& m = b.model;
  m.regime = Regime::Structural;
  Material mat;
  mat.E = 29e6;
  mat.nu = 0.22;
  mat.thickness = 0.05;
  const int nw = 4, nl = 24;
  const double len = 12.0, width = 1.1;
  auto id = [&](int i, int j) { return j * (nw + 1) + i; };
  for (int j = 0; j <= nl; ++j) {
    const double x = len * j / nl;
    const double phi = 0.5 * M_PI * j / nl;
    for (int i = 0; i <= nw; ++i) {
      const double s = width * (static_cast<double>(i) / nw - 0.5);
      m.nodes.push_back(Vec3(x, s * std::cos(phi), s * std::sin(phi)));
    }
  }
  for (int j = 0; j < nl; ++j)
    for (int i = 0; i < nw; ++i)
      add_cell(m, K::QuadShell4, id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j), mat);
  for (int i = 0; i <= nw; ++i) clamp(m, id(i, 0));
  const double fmax = 60.0;
  for (int i = 0; i < nw; ++i) m.edge_loads.push_back({id(i, nl), id(i + 1, nl), Vec3(0, 0, fmax / width)});
  const int tip = id(nw / 2, nl);
  m.monitors = {{tip, 0}, {tip, 1}, {tip, 2}};
  b.steps = 20;
  b.methods = all_methods();
  b.frames = {F::QuadShellFrame};
  return b;
}

// Slit annular plate, 6 radial x 30 circumferential QuadShell4; the edge at
// angle 0 is clamped, the edge at angle 2 pi carries the line load.
Benchmark slit_annulus(const BenchOptions&) {
  Benchmark b;
  b.name = "slit-annulus";
  Model& m = b.model;
  m.regime = Regime::Structural;
  Material mat;
  mat.E = 21e6;
  mat.nu = 0.0;
  mat.thickness = 0.03;
  const int nr = 6, nt = 30;
  const double ri = 6.0, ro = 10.0;
  auto id = [&](int i, int j) { return j * (nr + 1) + i; };
  for (int j = 0; j <= nt; ++j) {
    const double t = 2.0 * M_PI * j / nt;
    for (int i = 0; i <= nr; ++i) {
      const double r = ri + (ro - ri) * i / nr;
      // the last ray coincides with the first in space; the slit keeps them apart
      m.nodes.push_back(Vec3(r * std::cos(t), r * std::sin(t), 0.0));
    }
  }
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) add_cell(m, K::QuadShell4, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), mat);
  for (int i = 0; i <= nr; ++i) clamp(m, id(i, 0));
  for (int i = 0; i < nr; ++i) m.edge_loads.push_back({id(i, nt), id(i + 1, nt), Vec3(0, 0, 0.8)});
  m.monitors = {{id(nr / 2, nt), 2}, {id(nr, nt), 2}, {id(0, nt), 2}};
  b.steps = 50;
  b.methods = all_methods();
  b.frames = {F::QuadShellFrame};
  return b;
}

// Inclined bar with a roller end pulled vertically: one nonlinear DOF.
Benchmark bar_sanity(const BenchOptions&) {
  Benchmark b;
  b.name = "bar-sanity";
  Model& m = b.model;
  m.regime = Regime::Plane;
  Material mat;
  mat.E = 100.0;
  mat.thickness = 1.0;  // area
  m.nodes = {Vec3(0, 0, 0), Vec3(4, 1, 0)};
  m.elements.push_back(make_element(K::Bar2, {0, 1}, mat));
  clamp(m, 0);
  m.fixed.push_back({1, 0, 0.0});
  NodalLoad l;
  l.node = 1;
  l.vector = Eigen::Vector2d(0.0, 10.0);
  m.loads.push_back(l);
  m.monitors = {{1, 1}};
  b.steps = 5;
  b.methods = all_methods();
  b.methods.resize(3);  // CaseII/III need rotational DOFs
  b.frames = {F::SideAlign2D};
  return b;
}

}  // namespace

std::vector<std::string> benchmark_names() {
  return {"plane-angle-frame", "spatial-cantilever", "spatial-angle-frame", "l-shaped-frame",
          "pretwisted-beam",   "slit-annulus",       "bar-sanity"};
}

Benchmark generate(const std::string& name, const BenchOptions& opt) {
  Benchmark b;
  if (name == "plane-angle-frame") b = plane_angle_frame(opt);
  else if (name == "spatial-cantilever") b = spatial_cantilever(opt);
  else if (name == "spatial-angle-frame") b = spatial_angle_frame(opt);
  else if (name == "l-shaped-frame") b = l_shaped_frame(opt);
  else if (name == "pretwisted-beam") b = pretwisted_beam(opt);
  else if (name == "slit-annulus") b = slit_annulus(opt);
  else if (name == "bar-sanity") b = bar_sanity(opt);
  else throw Error(ErrorCode::UnknownBenchmark, "unknown benchmark '" + name + "'");
  if (opt.steps) b.steps = *opt.steps;
  b.model.validate();
  return b;
}

Model with_frame(const Model& m, FrameStrategy s) {
  Model out = m;
  for (auto& e : out.elements) {
    check_compatible(e.kind, s);
    e.frame = s;
  }
  return out;
}

std::vector<std::vector<double>> monitor_history(const RunResult& r) {
  std::vector<std::vector<double>> h;
  for (const auto& s : r.history) h.push_back(s.monitors);
  return h;
}

double curve_deviation(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size() || a.empty()) return kInf;
  double num = 0.0, den = 0.0;
  for (size_t s = 0; s < a.size(); ++s) {
    if (a[s].size() != b[s].size()) return kInf;
    for (size_t k = 0; k < a[s].size(); ++k) {
      num = std::max(num, std::abs(a[s][k] - b[s][k]));
      den = std::max(den, std::abs(b[s][k]));
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : kInf;
  return num / den;
}

const MatrixCell* MatrixReport::find(Method m, FrameStrategy f) const {
  for (const auto& c : cells)
    if (c.method == m && c.frame == f) return &c;
  return nullptr;
}

double MatrixReport::deviation(Method a, Method b, FrameStrategy f) const {
  const MatrixCell* ca = find(a, f);
  const MatrixCell* cb = find(b, f);
  if (!ca || !cb || !ca->result.completed || !cb->result.completed) return kInf;
  return curve_deviation(monitor_history(ca->result), monitor_history(cb->result));
}

MatrixReport run_matrix(const Benchmark& b, const std::vector<Method>& methods,
                        const std::vector<FrameStrategy>& frames, const SolverConfig& base) {
  MatrixReport rep;
  rep.name = b.name;
  for (const auto& mon : b.model.monitors) rep.monitor_names.push_back(monitor_name(b.model, mon));
  for (FrameStrategy f : frames) {
    std::optional<Prepared> prep;
    std::string prep_error;
    try {
      prep.emplace(with_frame(b.model, f));
    } catch (const Error& e) {
      prep_error = e.what();
    }
    for (Method m : methods) {
      MatrixCell cell;
      cell.method = m;
      cell.frame = f;
      if (!prep) {
        cell.error = prep_error;
        rep.cells.push_back(std::move(cell));
        continue;
      }
      SolverConfig cfg = base;
      cfg.method = m;
      cfg.steps = b.steps;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        cell.result = run(*prep, cfg);
        if (!cell.result.completed) cell.error = cell.result.failure;
      } catch (const Error& e) {
        cell.error = e.what();
      }
      cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (const auto& s : cell.result.history) {
        cell.max_equilibrium_ratio = std::max(cell.max_equilibrium_ratio, s.max_equilibrium_ratio);
        for (double u : s.unbalanced) cell.max_unbalanced = std::max(cell.max_unbalanced, u);
      }
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

std::string history_csv(const Model& m, const RunResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "step,load_factor";
  for (const auto& mon : m.monitors) os << "," << monitor_name(m, mon);
  os << "\n";
  for (size_t s = 0; s < r.history.size(); ++s) {
    os << s << "," << r.history[s].load_factor;
    for (double v : r.history[s].monitors) os << "," << v;
    os << "\n";
  }
  return os.str();
}

std::string diagnostics_csv(const RunResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "step,element,unbalanced_moment_norm\n";
  for (size_t s = 1; s < r.history.size(); ++s)
    for (size_t e = 0; e < r.history[s].unbalanced.size(); ++e) os << s << "," << e << "," << r.history[s].unbalanced[e] << "\n";
  return os.str();
}

std::string summary_text(const MatrixReport& rep) {
  std::ostringstream os;
  os << "benchmark " << rep.name << "\n\n";
  os << std::left << std::setw(10) << "frame" << std::setw(8) << "method" << std::setw(10) << "status" << std::setw(8)
     << "steps" << std::setw(14) << "max|m_unbal|" << std::setw(14) << "max|g|ratio" << "seconds\n";
  for (const auto& c : rep.cells) {
    os << std::setw(10) << frame_name(c.frame) << std::setw(8) << to_string(c.method) << std::setw(10)
       << (c.result.completed ? "ok" : "failed") << std::setw(8)
       << (c.result.history.empty() ? 0 : c.result.history.size() - 1) << std::setw(14) << std::setprecision(3)
       << c.max_unbalanced << std::setw(14) << c.max_equilibrium_ratio << std::fixed << std::setprecision(2)
       << c.seconds << std::defaultfloat << "\n";
    if (!c.error.empty()) os << "  error: " << c.error << "\n";
  }
  os << "\npairwise curve deviation (max |a-b| / max |b|)\n";
  std::vector<FrameStrategy> frames;
  std::vector<Method> methods;
  for (const auto& c : rep.cells) {
    if (std::find(frames.begin(), frames.end(), c.frame) == frames.end()) frames.push_back(c.frame);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) methods.push_back(c.method);
  }
  for (FrameStrategy f : frames) {
    os << "frame " << frame_name(f) << "\n" << std::setw(8) << "";
    for (Method b : methods) os << std::setw(12) << to_string(b);
    os << "\n";
    for (Method a : methods) {
      os << std::setw(8) << to_string(a);
      for (Method b : methods) os << std::setw(12) << std::setprecision(3) << rep.deviation(a, b, f);
      os << "\n";
    }
  }
  return os.str();
}

void write_report(const MatrixReport& rep, const Model& m, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& c : rep.cells) {
    const std::string stem = rep.name + "_" + frame_name(c.frame) + "_" + to_string(c.method);
    std::ofstream(fs::path(dir) / (stem + ".csv")) << history_csv(m, c.result);
    std::ofstream(fs::path(dir) / (stem + "_diag.csv")) << diagnostics_csv(c.result);
  }
  std::ofstream(fs::path(dir) / "summary.txt") << summary_text(rep);
}

}  // namespace crfc
