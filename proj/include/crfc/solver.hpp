#pragma once

// Global model, assembly of the final element forces and tangents, and
// Newton-Raphson load stepping with multiplicative triad updates.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crfc/correction.hpp"
#include "crfc/corot.hpp"

namespace crfc {

enum class Method { S, SP, SC1, SC2, SC3 };

const char* to_string(Method m);
Method parse_method(const std::string& name);
std::vector<Method> all_methods();
/// Weight case of a corrected method.
WeightCase weight_case(Method m);

struct ElementSpec {
  ElementKind kind = ElementKind::Cst3;
  std::vector<int> nodes;
  Material mat;
  FrameStrategy frame = FrameStrategy::SideAlign2D;
  std::optional<Vec3> orientation;  // Beam2 only
};

struct Fixed {
  int node = 0;
  int dof = 0;
  double value = 0.0;  // scaled with the load factor
};

struct NodalLoad {
  int node = 0;
  VectorXd vector;  // dofs_per_node entries
  bool constant = false;
};

/// Uniform force per unit length on a straight edge, lumped half to each end.
struct EdgeLoad {
  int n1 = 0;
  int n2 = 0;
  Vec3 traction = Vec3::Zero();
  bool constant = false;
};

struct Monitor {
  int node = 0;
  int dof = 0;
};

struct Model {
  Regime regime = Regime::Plane;
  std::vector<Vec3> nodes;
  std::vector<ElementSpec> elements;
  std::vector<Fixed> fixed;
  std::vector<NodalLoad> loads;
  std::vector<EdgeLoad> edge_loads;
  std::vector<Monitor> monitors;

  int dpn() const { return dofs_per_node(regime); }
  int ndof() const { return static_cast<int>(nodes.size()) * dpn(); }
  /// Throws ValidationError naming the offending entry.
  void validate() const;
};

std::string monitor_name(const Model& m, const Monitor& mon);

struct GlobalState {
  VectorXd u;
  std::vector<Mat3> triads;
  double load_factor = 0.0;
};

GlobalState initial_state(const Model& m);

struct SolverConfig {
  Method method = Method::SC1;
  int steps = 20;
  double tol = 1e-5;
  int max_iter = 30;
  int max_cuts = 6;
  /// Newton increments whose largest nodal rotation exceeds this are scaled
  /// down to it (0 disables).
  double max_rotation_increment = 0.5;
  bool parallel = true;
  /// Called once per Newton iteration with the element diagnostics.
  bool record_diagnostics = true;
};

/// Per-element diagnostics of one assembly.
struct ElementDiag {
  double unbalanced_moment = 0.0;  // of the final element force
  double equilibrium_ratio = 0.0;  // |g(f, x)| / (1 + |f|_inf diam)
};

struct Assembly {
  VectorXd fint;
  MatrixXd K;
  std::vector<ElementDiag> diag;
};

/// Model with precomputed element references and load vectors.
class Prepared {
 public:
  explicit Prepared(Model m);

  const Model& model() const { return model_; }
  const std::vector<ElementRef>& refs() const { return refs_; }
  const VectorXd& ramp_load() const { return ramp_; }
  const VectorXd& constant_load() const { return const_; }
  const std::vector<int>& free_dofs() const { return free_; }
  const std::vector<int>& fixed_dofs() const { return fixed_dofs_; }
  const VectorXd& fixed_values() const { return fixed_values_; }
  /// Global DOF indices of element e.
  std::vector<int> element_dofs(int e) const;
  ElementGlobalState element_config(int e, const GlobalState& s) const;

 private:
  Model model_;
  std::vector<ElementRef> refs_;
  VectorXd ramp_, const_;
  std::vector<int> free_, fixed_dofs_;
  VectorXd fixed_values_;
};

struct ElementResponse {
  VectorXd f;
  MatrixXd K;
  ElementDiag diag;
};

/// Final element force and tangent of one method (Table 1, step 1).
ElementResponse element_response(const ElementRef& ref, const ElementGlobalState& c, Method m,
                                 bool with_tangent = true);

/// Final element force at a generic scalar, for complex-step oracles.
template <class T>
VecX<T> element_force(const ElementRef& ref, const ElementConfig<T>& c, Method m) {
  switch (m) {
    case Method::S: return force_S<T>(ref, c);
    case Method::SP: return force_SP<T>(ref, c);
    default: {
      const VecX<T> f = force_S<T>(ref, c);
      return f + correct_generic<T>(ref.regime, f, c.x, weight_case(m)).fc;
    }
  }
}

Assembly assemble_serial(const Prepared& p, const GlobalState& s, Method m, bool with_tangent = true);
Assembly assemble_parallel(const Prepared& p, const GlobalState& s, Method m, bool with_tangent = true);
Assembly assemble(const Prepared& p, const GlobalState& s, Method m, bool parallel, bool with_tangent = true);

/// Complex-step Jacobian of the assembled internal force over all global DOFs.
MatrixXd assembled_force_jacobian_cs(const Prepared& p, const GlobalState& s, Method m);

/// Additive translations, multiplicative rotations (Table 1, step 3).
void apply_increment(const Prepared& p, GlobalState& s, const VectorXd& du);

/// Residual (load_factor * ramp + constant - fint) restricted to free DOFs.
VectorXd free_residual(const Prepared& p, const GlobalState& s, const VectorXd& fint);

struct StepRecord {
  double load_factor = 0.0;
  int iterations = 0;
  int cuts = 0;
  std::vector<double> residuals;     // one per iteration, starting value first
  double max_equilibrium_ratio = 0.0;  // worst element over all iterations
  std::vector<double> monitors;
  std::vector<double> unbalanced;    // per element at the converged state
  GlobalState state;
};

/// Newton iterations from `s` at fixed load factor `target`. Throws
/// NoConvergence, StepTooLarge or geometric errors.
StepRecord solve_step(const Prepared& p, GlobalState& s, double target, const SolverConfig& cfg);

struct RunResult {
  std::vector<StepRecord> history;  // converged steps, index 0 = reference
  bool completed = false;
  std::string failure;
};

RunResult run(const Prepared& p, const SolverConfig& cfg);

std::vector<double> monitor_values(const Prepared& p, const GlobalState& s);

/// Linear FEM solution u = K0^-1 F for the full ramp load (reference tangent
/// assembled from the rotated linear element stiffnesses).
VectorXd linear_solution(const Prepared& p);

}  // namespace crfc
