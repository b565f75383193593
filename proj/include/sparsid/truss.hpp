#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sparsid {

struct Node {
  int id;     // 0-based, contiguous
  double x;   // m
  double y;   // m
};

struct BarElement {
  int id;                  // 0-based, contiguous
  int node_i;
  int node_j;
  double elastic_modulus;  // Pa
  double area;             // m^2
  double density;          // kg/m^3
};

struct Support {
  int node;
  bool fix_x;
  bool fix_y;
};

/// Per-element stiffness multipliers, nominal = 1. Damage states have
/// 0 < theta_i <= 1; the updating loop may pass through values above 1.
struct StiffnessParams {
  Eigen::VectorXd theta;

  static StiffnessParams nominal(int element_count) {
    return StiffnessParams{Eigen::VectorXd::Ones(element_count)};
  }
};

/// Planar pin-jointed truss. Immutable after construction; all matrix
/// assembly routines are pure functions of (model, theta).
///
/// Free-DOF numbering is node-major with x before y, skipping constrained
/// DOFs, so assembled matrices are bit-reproducible across runs.
class TrussModel {
 public:
  TrussModel(std::vector<Node> nodes, std::vector<BarElement> elements,
             std::vector<Support> supports);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<BarElement>& elements() const { return elements_; }
  const std::vector<Support>& supports() const { return supports_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int element_count() const { return static_cast<int>(elements_.size()); }
  int n_dof() const { return n_dof_; }
  int constrained_dof_count() const { return 2 * node_count() - n_dof_; }

  /// Free-DOF index of (node, direction) or -1 when constrained.
  /// direction: 0 = x, 1 = y.
  int dof_index(int node, int direction) const { return dof_map_[2 * node + direction]; }

  double element_length(int element_id) const;

  /// 4x4 global-coordinate bar stiffness for DOFs [ix, iy, jx, jy],
  /// scaled by theta_i. Symmetric PSD of rank 1.
  Eigen::Matrix4d element_stiffness(int element_id, double theta_i) const;

  /// Element contribution K_i scattered to free DOFs (theta_i = 1).
  Eigen::MatrixXd element_contribution(int element_id) const;

  /// K(theta) = sum_i theta_i * K_i on free DOFs. Symmetric.
  Eigen::MatrixXd assemble_stiffness(const StiffnessParams& params) const;

  /// Diagonal of the lumped mass matrix on free DOFs: each bar puts
  /// rho*A*L/2 on each end node's x and y DOFs. Independent of theta.
  Eigen::VectorXd assemble_mass() const;

  /// Axial stretch of an element for a free-DOF displacement vector
  /// (constrained DOFs move zero). phi^T K_i phi = (EA/L) * stretch^2.
  double element_stretch(int element_id, const Eigen::VectorXd& shape) const;

 private:
  std::vector<Node> nodes_;
  std::vector<BarElement> elements_;
  std::vector<Support> supports_;
  std::vector<int> dof_map_;  // 2 per node: free index or -1
  int n_dof_ = 0;
};

/// The built-in benchmark: a 4-bay, 1 m x 1 m planar truss with 10 nodes and
/// 20 bars, pinned at both bottom corners (16 free DOFs). All bars aluminum:
/// E = 70 GPa, A = 0.01 m^2, rho = 2700 kg/m^3.
///
/// Canonical bar numbering (1-based in docs and CLI output, 0-based in code):
///   bars  1-4   bottom chords, left to right
///   bars  5-8   top chords, left to right
///   bars  9-12  verticals at x = 0, 1, 2, 3 m
///   bars 13-20  X-brace diagonals, two per bay left to right
///               (bottom-left to top-right first, then top-left to bottom-right)
TrussModel canonical_truss();

/// Parses a model document (JSON: nodes/elements/supports) from text.
TrussModel model_from_json_text(const std::string& text);

/// Loads a model document from a file path.
TrussModel load_model(const std::string& path);

/// Serializes a model to the document schema.
std::string model_to_json_text(const TrussModel& model);

}  // namespace sparsid
