#include "crfc/solver.hpp"

#include <Eigen/SparseLU>

#include <omp.h>

#include <cmath>
#include <exception>
#include <sstream>

namespace crfc {

const char* to_string(Method m) {
  switch (m) {
    case Method::S: return "s";
    case Method::SP: return "sp";
    case Method::SC1: return "sc1";
    case Method::SC2: return "sc2";
    case Method::SC3: return "sc3";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (name == to_string(m)) return m;
  throw Error(ErrorCode::ParseError, "unknown method '" + name + "'");
}

std::vector<Method> all_methods() { return {Method::S, Method::SP, Method::SC1, Method::SC2, Method::SC3}; }

WeightCase weight_case(Method m) {
  switch (m) {
    case Method::SC2: return WeightCase::CaseII;
    case Method::SC3: return WeightCase::CaseIII;
    default: return WeightCase::CaseI;
  }
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ValidationError, what); }

}  // namespace

void Model::validate() const {
  const int nn = static_cast<int>(nodes.size());
  if (nn == 0) invalid("nodes: empty");
  if (elements.empty()) invalid("elements: empty");
  auto check_node = [&](int n, const std::string& where) {
    if (n < 0 || n >= nn) invalid(where + ": node " + std::to_string(n) + " out of range");
  };
  for (size_t e = 0; e < elements.size(); ++e) {
    const auto& el = elements[e];
    const std::string where = "elements[" + std::to_string(e) + "]";
    if (regime_of(el.kind) != regime) {
      invalid(where + ".kind: " + to_string(el.kind) + " does not belong to regime " + to_string(regime));
    }
    if (static_cast<int>(el.nodes.size()) != node_count(el.kind)) invalid(where + ".nodes: wrong node count");
    for (int n : el.nodes) check_node(n, where + ".nodes");
    try {
      check_compatible(el.kind, el.frame);
      el.mat.validate(el.kind);
    } catch (const Error& err) {
      invalid(where + ": " + err.what());
    }
  }
  for (size_t k = 0; k < fixed.size(); ++k) {
    const std::string where = "fixed[" + std::to_string(k) + "]";
    check_node(fixed[k].node, where);
    if (fixed[k].dof < 0 || fixed[k].dof >= dpn()) invalid(where + ".dofs: index out of range");
    if (fixed[k].dof >= translation_dim(regime) && fixed[k].value != 0.0)
      invalid(where + ".value: prescribed rotations must be zero");
  }
  for (size_t k = 0; k < loads.size(); ++k) {
    const std::string where = "loads[" + std::to_string(k) + "]";
    check_node(loads[k].node, where);
    if (loads[k].vector.size() != dpn()) invalid(where + ".vector: expected " + std::to_string(dpn()) + " entries");
  }
  for (size_t k = 0; k < edge_loads.size(); ++k) {
    const std::string where = "loads[edge " + std::to_string(k) + "]";
    check_node(edge_loads[k].n1, where);
    check_node(edge_loads[k].n2, where);
  }
  for (size_t k = 0; k < monitors.size(); ++k) {
    const std::string where = "monitors[" + std::to_string(k) + "]";
    check_node(monitors[k].node, where);
    if (monitors[k].dof < 0 || monitors[k].dof >= dpn()) invalid(where + ".dof: out of range");
  }
}

std::string monitor_name(const Model& m, const Monitor& mon) {
  return "n" + std::to_string(mon.node) + "_" + dof_labels(m.regime)[mon.dof];
}

GlobalState initial_state(const Model& m) {
  GlobalState s;
  s.u = VectorXd::Zero(m.ndof());
  if (has_rotations(m.regime)) s.triads.assign(m.nodes.size(), Mat3::Identity());
  return s;
}

Prepared::Prepared(Model m) : model_(std::move(m)) {
  model_.validate();
  const int dpn = model_.dpn();
  const int td = translation_dim(model_.regime);
  for (const auto& el : model_.elements) {
    std::vector<Vec3> x;
    for (int n : el.nodes) x.push_back(model_.nodes[n]);
    refs_.push_back(make_element_ref(el.kind, el.frame, el.mat, x, el.orientation));
  }
  const int n = model_.ndof();
  ramp_ = VectorXd::Zero(n);
  const_ = VectorXd::Zero(n);
  for (const auto& l : model_.loads) (l.constant ? const_ : ramp_).segment(l.node * dpn, dpn) += l.vector;
  for (const auto& l : model_.edge_loads) {
    const double len = (model_.nodes[l.n2] - model_.nodes[l.n1]).norm();
    VectorXd& tgt = l.constant ? const_ : ramp_;
    for (int node : {l.n1, l.n2}) tgt.segment(node * dpn, td) += 0.5 * len * l.traction.head(td);
  }
  std::vector<int> mask(n, -1);
  std::vector<double> value(n, 0.0);
  for (const auto& f : model_.fixed) {
    mask[f.node * dpn + f.dof] = 1;
    value[f.node * dpn + f.dof] = f.value;
  }
  for (int i = 0; i < n; ++i) (mask[i] > 0 ? fixed_dofs_ : free_).push_back(i);
  fixed_values_.resize(fixed_dofs_.size());
  for (size_t k = 0; k < fixed_dofs_.size(); ++k) fixed_values_(k) = value[fixed_dofs_[k]];
}

std::vector<int> Prepared::element_dofs(int e) const {
  const int dpn = model_.dpn();
  std::vector<int> d;
  for (int n : model_.elements[e].nodes)
    for (int k = 0; k < dpn; ++k) d.push_back(n * dpn + k);
  return d;
}

ElementGlobalState Prepared::element_config(int e, const GlobalState& s) const {
  const int dpn = model_.dpn();
  const int td = translation_dim(model_.regime);
  ElementGlobalState c;
  for (int n : model_.elements[e].nodes) {
    Vec3 x = model_.nodes[n];
    for (int k = 0; k < td; ++k) x(k) += s.u(n * dpn + k);
    if (model_.regime == Regime::Plane) x.z() = 0.0;
    c.x.push_back(x);
    if (!s.triads.empty()) c.triads.push_back(s.triads[n]);
  }
  return c;
}

ElementResponse element_response(const ElementRef& ref, const ElementGlobalState& c, Method m, bool with_tangent) {
  ElementResponse r;
  switch (m) {
    case Method::S:
      r.f = force_S<double>(ref, c);
      if (with_tangent) r.K = tangent(ForcePath::S, ref, c);
      break;
    case Method::SP:
      r.f = force_SP<double>(ref, c);
      if (with_tangent) r.K = tangent(ForcePath::SP, ref, c);
      break;
    default: {
      const VectorXd f = force_S<double>(ref, c);
      const auto corr = correct(ref.regime, f, c.x, weight_case(m));
      r.f = f + corr.fc;
      if (with_tangent) {
        const MatrixXd k = tangent(ForcePath::S, ref, c);
        r.K = k + correction_tangent(ref.regime, f, k, c.x, weight_case(m), corr);
      }
    }
  }
  const double scale = 1.0 + r.f.lpNorm<Eigen::Infinity>() * ref.diameter();
  r.diag.unbalanced_moment = unbalanced_moment(ref.regime, r.f, c.x).norm();
  r.diag.equilibrium_ratio = constraint<double>(ref.regime, r.f, c.x).norm() / scale;
  return r;
}

namespace {

Assembly scatter(const Prepared& p, const std::vector<ElementResponse>& resp, bool with_tangent) {
  const int n = p.model().ndof();
  Assembly a;
  a.fint = VectorXd::Zero(n);
  if (with_tangent) a.K = MatrixXd::Zero(n, n);
  for (size_t e = 0; e < resp.size(); ++e) {
    const auto d = p.element_dofs(static_cast<int>(e));
    const auto& r = resp[e];
    for (size_t i = 0; i < d.size(); ++i) {
      a.fint(d[i]) += r.f(i);
      if (with_tangent)
        for (size_t j = 0; j < d.size(); ++j) a.K(d[i], d[j]) += r.K(i, j);
    }
    a.diag.push_back(r.diag);
  }
  return a;
}

[[noreturn]] void rethrow_element(int e, const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const Error& err) {
    throw Error(err.code(), "element " + std::to_string(e) + ": " + err.what());
  }
}

}  // namespace

Assembly assemble_serial(const Prepared& p, const GlobalState& s, Method m, bool with_tangent) {
  std::vector<ElementResponse> resp;
  for (int e = 0; e < static_cast<int>(p.refs().size()); ++e) {
    try {
      resp.push_back(element_response(p.refs()[e], p.element_config(e, s), m, with_tangent));
    } catch (const Error&) {
      rethrow_element(e, std::current_exception());
    }
  }
  return scatter(p, resp, with_tangent);
}

Assembly assemble_parallel(const Prepared& p, const GlobalState& s, Method m, bool with_tangent) {
  const int ne = static_cast<int>(p.refs().size());
  std::vector<ElementResponse> resp(ne);
  std::vector<std::exception_ptr> errors(ne);
#pragma omp parallel for schedule(dynamic)
  for (int e = 0; e < ne; ++e) {
    try {
      resp[e] = element_response(p.refs()[e], p.element_config(e, s), m, with_tangent);
    } catch (...) {
      errors[e] = std::current_exception();
    }
  }
  for (int e = 0; e < ne; ++e)
    if (errors[e]) rethrow_element(e, errors[e]);
  return scatter(p, resp, with_tangent);
}

Assembly assemble(const Prepared& p, const GlobalState& s, Method m, bool parallel, bool with_tangent) {
  return parallel ? assemble_parallel(p, s, m, with_tangent) : assemble_serial(p, s, m, with_tangent);
}

MatrixXd assembled_force_jacobian_cs(const Prepared& p, const GlobalState& s, Method m) {
  const double h = 1e-50;
  const Model& mod = p.model();
  const int n = mod.ndof();
  const int dpn = mod.dpn();
  const int td = translation_dim(mod.regime);
  MatrixXd jac = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const int node = j / dpn;
    const int comp = j % dpn;
    VectorXd col = VectorXd::Zero(n);
    for (int e = 0; e < static_cast<int>(p.refs().size()); ++e) {
      const auto& nodes = mod.elements[e].nodes;
      int local = -1;
      for (size_t a = 0; a < nodes.size(); ++a)
        if (nodes[a] == node) local = static_cast<int>(a);
      if (local < 0) continue;
      const auto& ref = p.refs()[e];
      ElementConfig<Complex> c = detail::lift_config<double>(p.element_config(e, s));
      perturb_dof<double>(c, local, comp >= td, Vec3::Unit(comp >= td ? comp - td : comp), h);
      const VecX<Complex> f = element_force<Complex>(ref, c, m);
      const auto d = p.element_dofs(e);
      for (size_t i = 0; i < d.size(); ++i) col(d[i]) += f(i).imag() / h;
    }
    jac.col(j) = col;
  }
  return jac;
}

void apply_increment(const Prepared& p, GlobalState& s, const VectorXd& du) {
  const int dpn = p.model().dpn();
  const int td = translation_dim(p.model().regime);
  const int nn = static_cast<int>(p.model().nodes.size());
  for (int i = 0; i < nn; ++i) {
    s.u.segment(i * dpn, td) += du.segment(i * dpn, td);
    if (!s.triads.empty()) {
      const Vec3 w = du.segment<3>(i * dpn + 3);
      s.triads[i] = exp_rotvec<double>(w) * s.triads[i];
      const auto [angle, axis] = extract_angle_axis(s.triads[i]);
      s.u.segment<3>(i * dpn + 3) = angle * axis;
    }
  }
}

VectorXd free_residual(const Prepared& p, const GlobalState& s, const VectorXd& fint) {
  const VectorXd r = s.load_factor * p.ramp_load() + p.constant_load() - fint;
  const auto& fr = p.free_dofs();
  VectorXd out(fr.size());
  for (size_t k = 0; k < fr.size(); ++k) out(k) = r(fr[k]);
  return out;
}

std::vector<double> monitor_values(const Prepared& p, const GlobalState& s) {
  std::vector<double> out;
  const int dpn = p.model().dpn();
  for (const auto& m : p.model().monitors) out.push_back(s.u(m.node * dpn + m.dof));
  return out;
}

namespace {

void impose_prescribed(const Prepared& p, GlobalState& s) {
  // rotational entries of u mirror the triads; their constraints act on the
  // increments instead
  const auto& fd = p.fixed_dofs();
  const int dpn = p.model().dpn();
  const int td = translation_dim(p.model().regime);
  for (size_t k = 0; k < fd.size(); ++k)
    if (fd[k] % dpn < td) s.u(fd[k]) = s.load_factor * p.fixed_values()(static_cast<Eigen::Index>(k));
}

// Solves K_ff dx = r. Small systems go through a dense LU with a condition
// check, larger shell and solid meshes through a sparse LU.
VectorXd solve_tangent(const MatrixXd& K, const std::vector<int>& fr, const VectorXd& r) {
  const int nf = static_cast<int>(fr.size());
  if (nf <= 200) {
    MatrixXd kf(nf, nf);
    for (int j = 0; j < nf; ++j)
      for (int i = 0; i < nf; ++i) kf(i, j) = K(fr[i], fr[j]);
    Eigen::PartialPivLU<MatrixXd> lu(kf);
    if (!(lu.rcond() > 1e-15)) throw Error(ErrorCode::SingularTangent, "tangent is singular");
    return lu.solve(r);
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int j = 0; j < nf; ++j)
    for (int i = 0; i < nf; ++i) {
      const double v = K(fr[i], fr[j]);
      if (v != 0.0) trip.emplace_back(i, j, v);
    }
  Eigen::SparseMatrix<double> kf(nf, nf);
  kf.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(kf);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularTangent, "tangent is singular");
  VectorXd dx = lu.solve(r);
  // no cheap condition estimate here; a large normwise backward error is
  // treated as singular
  const double scale = kf.cwiseAbs().sum() / nf * dx.norm() + r.norm();
  if (!dx.allFinite() || (kf * dx - r).norm() > 1e-10 * scale)
    throw Error(ErrorCode::SingularTangent, "tangent is singular");
  return dx;
}

}  // namespace

StepRecord solve_step(const Prepared& p, GlobalState& s, double target, const SolverConfig& cfg) {
  StepRecord rec;
  GlobalState trial = s;
  trial.load_factor = target;
  impose_prescribed(p, trial);
  const auto& fr = p.free_dofs();
  const int nf = static_cast<int>(fr.size());
  double first = -1.0;
  for (int it = 0;; ++it) {
    const Assembly a = assemble(p, trial, cfg.method, cfg.parallel, true);
    for (const auto& d : a.diag) rec.max_equilibrium_ratio = std::max(rec.max_equilibrium_ratio, d.equilibrium_ratio);
    const VectorXd r = free_residual(p, trial, a.fint);
    const double rn = r.norm();
    rec.residuals.push_back(rn);
    if (!std::isfinite(rn)) throw Error(ErrorCode::NoConvergence, "non-finite residual");
    if (first < 0) first = std::max(rn, 1.0);
    if (rn <= cfg.tol) {
      rec.iterations = it;
      rec.load_factor = target;
      for (const auto& d : a.diag) rec.unbalanced.push_back(d.unbalanced_moment);
      s = trial;
      rec.monitors = monitor_values(p, s);
      rec.state = s;
      return rec;
    }
    if (it >= cfg.max_iter || rn > 1e12 * first) {
      throw Error(ErrorCode::NoConvergence, "residual " + std::to_string(rn) + " after " + std::to_string(it) +
                                                " iterations at load factor " + std::to_string(target));
    }
    const VectorXd dx = solve_tangent(a.K, fr, r);
    VectorXd du = VectorXd::Zero(p.model().ndof());
    for (int k = 0; k < nf; ++k) du(fr[k]) = dx(k);
    if (!trial.triads.empty() && cfg.max_rotation_increment > 0) {
      // scale the whole increment down when a nodal rotation overshoots
      double wmax = 0.0;
      for (size_t i = 0; i < trial.triads.size(); ++i) wmax = std::max(wmax, du.segment<3>(i * 6 + 3).norm());
      if (wmax > cfg.max_rotation_increment) du *= cfg.max_rotation_increment / wmax;
    }
    apply_increment(p, trial, du);
  }
}

namespace {

bool recoverable(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::StepTooLarge:
    case ErrorCode::SingularTangent:
    case ErrorCode::NonFiniteResult:
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::InvertedElement:
    case ErrorCode::CollinearNodes:
    case ErrorCode::DegenerateSide:
    case ErrorCode::DegenerateDiagonals:
      return true;
    default: return false;
  }
}

// Advances s from its load factor to `target`, bisecting on failure.
void advance(const Prepared& p, GlobalState& s, double target, int depth, const SolverConfig& cfg,
             std::vector<StepRecord>& subs) {
  GlobalState trial = s;
  try {
    StepRecord r = solve_step(p, trial, target, cfg);
    r.cuts = depth;
    subs.push_back(std::move(r));
    s = trial;
  } catch (const Error& e) {
    if (!recoverable(e.code()) || depth >= cfg.max_cuts) throw;
    const double mid = 0.5 * (s.load_factor + target);
    advance(p, s, mid, depth + 1, cfg, subs);
    advance(p, s, target, depth + 1, cfg, subs);
  }
}

}  // namespace

RunResult run(const Prepared& p, const SolverConfig& cfg) {
  if (cfg.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  if (!(cfg.tol > 0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  RunResult out;
  GlobalState s = initial_state(p.model());
  {
    StepRecord r0;
    r0.state = s;
    r0.monitors = monitor_values(p, s);
    r0.unbalanced.assign(p.refs().size(), 0.0);
    out.history.push_back(r0);
  }
  for (int k = 1; k <= cfg.steps; ++k) {
    const double target = static_cast<double>(k) / cfg.steps;
    std::vector<StepRecord> subs;
    try {
      advance(p, s, target, 0, cfg, subs);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "step " << k << ": " << e.what();
      out.failure = os.str();
      return out;
    }
    // one record per requested step; sub-steps fold into it
    StepRecord r = subs.back();
    r.iterations = 0;
    r.residuals.clear();
    for (const auto& sr : subs) {
      r.iterations += sr.iterations;
      r.cuts = std::max(r.cuts, sr.cuts);
      r.max_equilibrium_ratio = std::max(r.max_equilibrium_ratio, sr.max_equilibrium_ratio);
      r.residuals.insert(r.residuals.end(), sr.residuals.begin(), sr.residuals.end());
    }
    out.history.push_back(std::move(r));
  }
  out.completed = true;
  return out;
}

VectorXd linear_solution(const Prepared& p) {
  const Model& m = p.model();
  const int n = m.ndof();
  MatrixXd k = MatrixXd::Zero(n, n);
  for (int e = 0; e < static_cast<int>(p.refs().size()); ++e) {
    const auto& ref = p.refs()[e];
    const int dpn = ref.dpn();
    MatrixXd t = MatrixXd::Zero(ref.ndof(), ref.ndof());
    for (int i = 0; i < ref.nodes(); ++i) {
      t.block(i * dpn, i * dpn, ref.tdim(), ref.tdim()) = ref.R0.topLeftCorner(ref.tdim(), ref.tdim());
      if (ref.rotations()) t.block(i * dpn + 3, i * dpn + 3, 3, 3) = ref.R0;
    }
    const MatrixXd ke = t * ref.K * t.transpose();
    const auto d = p.element_dofs(e);
    for (size_t i = 0; i < d.size(); ++i)
      for (size_t j = 0; j < d.size(); ++j) k(d[i], d[j]) += ke(i, j);
  }
  const auto& fr = p.free_dofs();
  const auto& fd = p.fixed_dofs();
  VectorXd u = VectorXd::Zero(n);
  for (size_t q = 0; q < fd.size(); ++q) u(fd[q]) = p.fixed_values()(static_cast<Eigen::Index>(q));
  const VectorXd rhs_full = p.ramp_load() + p.constant_load() - k * u;
  const int nf = static_cast<int>(fr.size());
  MatrixXd kf(nf, nf);
  VectorXd rf(nf);
  for (int i = 0; i < nf; ++i) {
    rf(i) = rhs_full(fr[i]);
    for (int j = 0; j < nf; ++j) kf(i, j) = k(fr[i], fr[j]);
  }
  const VectorXd x = kf.partialPivLu().solve(rf);
  for (int i = 0; i < nf; ++i) u(fr[i]) = x(i);
  return u;
}

}  // namespace crfc
