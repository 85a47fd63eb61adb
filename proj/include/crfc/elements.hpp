#pragma once

// Linear core elements. Stiffness matrices are expressed in the element's
// initial local frame and use node-major DOF ordering, translations before
// rotations within a node.

#include <string>
#include <vector>

#include "crfc/scalar.hpp"

namespace crfc {

enum class ElementKind { Bar2, Cst3, Quad4, Hex8, Beam2, TriShell3, QuadShell4 };

/// Uniform per-node DOF count of a model: plane 2, solid 3, structural 6.
enum class Regime { Plane, Solid, Structural };

struct Section {
  double A = 0.0;
  double Iy = 0.0;
  double Iz = 0.0;
  double J = 0.0;
};

struct Material {
  double E = 1.0;
  double nu = 0.0;
  double thickness = 1.0;  // plane and shell kinds
  Section section;         // Beam2
  /// Drilling penalty relative to the largest bending-block diagonal.
  double drill_factor = 1e-6;

  void validate(ElementKind kind) const;
};

int node_count(ElementKind kind);
int dofs_per_node(ElementKind kind);
Regime regime_of(ElementKind kind);
int dofs_per_node(Regime regime);
int translation_dim(Regime regime);
bool has_rotations(Regime regime);

const char* to_string(ElementKind kind);
const char* to_string(Regime regime);
ElementKind parse_element_kind(const std::string& name);
Regime parse_regime(const std::string& name);

/// Per-node DOF labels repeated over the nodes: ux uy [uz] [rx ry rz].
std::vector<std::string> dof_layout(ElementKind kind);
std::vector<std::string> dof_labels(Regime regime);

/// Small-strain stiffness in the initial local frame. `local` holds the
/// node coordinates in that frame (z ignored for plane and shell kinds).
MatrixXd local_stiffness(ElementKind kind, const std::vector<Vec3>& local, const Material& mat);

/// Shape-function gradients dN_i/dX at the parametric center, one row per
/// node (2 columns for plane kinds, 3 for Hex8).
MatrixXd center_shape_gradients(ElementKind kind, const std::vector<Vec3>& coords);

}  // namespace crfc
