#include "sparsid/truss.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sparsid {

namespace {

void validate(const std::vector<Node>& nodes, const std::vector<BarElement>& elements,
              const std::vector<Support>& supports) {
  if (nodes.empty()) throw std::invalid_argument("model has no nodes");
  if (elements.empty()) throw std::invalid_argument("model has no elements");

  std::set<int> node_ids;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!node_ids.insert(nodes[k].id).second)
      throw std::invalid_argument("duplicate node id " + std::to_string(nodes[k].id));
    if (nodes[k].id != static_cast<int>(k))
      throw std::invalid_argument("node ids must be contiguous from 0");
  }

  std::set<int> element_ids;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const BarElement& e = elements[k];
    if (!element_ids.insert(e.id).second)
      throw std::invalid_argument("duplicate element id " + std::to_string(e.id));
    if (e.id != static_cast<int>(k))
      throw std::invalid_argument("element ids must be contiguous from 0");
    if (!node_ids.count(e.node_i) || !node_ids.count(e.node_j))
      throw std::invalid_argument("element " + std::to_string(e.id) + ": unknown node id");
    if (e.node_i == e.node_j)
      throw std::invalid_argument("element " + std::to_string(e.id) + ": degenerate end nodes");
    const double dx = nodes[e.node_j].x - nodes[e.node_i].x;
    const double dy = nodes[e.node_j].y - nodes[e.node_i].y;
    if (std::hypot(dx, dy) <= 0.0)
      throw std::invalid_argument("element " + std::to_string(e.id) + ": zero-length bar");
    if (e.elastic_modulus <= 0 || e.area <= 0 || e.density <= 0)
      throw std::invalid_argument("element " + std::to_string(e.id) +
                                  ": E, A and rho must be positive");
  }

  for (const Support& s : supports) {
    if (!node_ids.count(s.node))
      throw std::invalid_argument("support references unknown node id " + std::to_string(s.node));
  }
}

}  // namespace

TrussModel::TrussModel(std::vector<Node> nodes, std::vector<BarElement> elements,
                       std::vector<Support> supports)
    : nodes_(std::move(nodes)), elements_(std::move(elements)), supports_(std::move(supports)) {
  validate(nodes_, elements_, supports_);

  std::vector<bool> fixed(2 * nodes_.size(), false);
  for (const Support& s : supports_) {
    if (s.fix_x) fixed[2 * s.node + 0] = true;
    if (s.fix_y) fixed[2 * s.node + 1] = true;
  }

  int constrained = 0;
  for (bool f : fixed) constrained += f ? 1 : 0;
  if (constrained < 3)
    throw std::invalid_argument("insufficient supports: at least 3 constrained DOFs required");

  dof_map_.assign(2 * nodes_.size(), -1);
  int next = 0;
  for (std::size_t d = 0; d < fixed.size(); ++d) {
    if (!fixed[d]) dof_map_[d] = next++;
  }
  n_dof_ = next;
  if (n_dof_ == 0) throw std::invalid_argument("model has no free DOFs");
}

double TrussModel::element_length(int element_id) const {
  const BarElement& e = elements_.at(element_id);
  const double dx = nodes_[e.node_j].x - nodes_[e.node_i].x;
  const double dy = nodes_[e.node_j].y - nodes_[e.node_i].y;
  return std::hypot(dx, dy);
}

Eigen::Matrix4d TrussModel::element_stiffness(int element_id, double theta_i) const {
  if (theta_i <= 0) throw std::invalid_argument("theta must be positive");
  const BarElement& e = elements_.at(element_id);
  const double length = element_length(element_id);
  const double c = (nodes_[e.node_j].x - nodes_[e.node_i].x) / length;
  const double s = (nodes_[e.node_j].y - nodes_[e.node_i].y) / length;
  const double k = theta_i * e.elastic_modulus * e.area / length;

  // Rank-1 pattern k * g g^T with g = (-c, -s, c, s).
  Eigen::Vector4d g(-c, -s, c, s);
  return k * (g * g.transpose());
}

Eigen::MatrixXd TrussModel::element_contribution(int element_id) const {
  const BarElement& e = elements_.at(element_id);
  const Eigen::Matrix4d ke = element_stiffness(element_id, 1.0);
  const int dof[4] = {dof_index(e.node_i, 0), dof_index(e.node_i, 1), dof_index(e.node_j, 0),
                      dof_index(e.node_j, 1)};

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_dof_, n_dof_);
  for (int a = 0; a < 4; ++a) {
    if (dof[a] < 0) continue;
    for (int b = 0; b < 4; ++b) {
      if (dof[b] < 0) continue;
      K(dof[a], dof[b]) += ke(a, b);
    }
  }
  return K;
}

Eigen::MatrixXd TrussModel::assemble_stiffness(const StiffnessParams& params) const {
  if (params.theta.size() != element_count())
    throw std::invalid_argument("theta length must equal element count");
  if ((params.theta.array() <= 0).any())
    throw std::invalid_argument("all theta entries must be positive");

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_dof_, n_dof_);
  for (int i = 0; i < element_count(); ++i) {
    const BarElement& e = elements_[i];
    const Eigen::Matrix4d ke = element_stiffness(i, params.theta[i]);
    const int dof[4] = {dof_index(e.node_i, 0), dof_index(e.node_i, 1), dof_index(e.node_j, 0),
                        dof_index(e.node_j, 1)};
    for (int a = 0; a < 4; ++a) {
      if (dof[a] < 0) continue;
      for (int b = 0; b < 4; ++b) {
        if (dof[b] < 0) continue;
        K(dof[a], dof[b]) += ke(a, b);
      }
    }
  }
  return K;
}

Eigen::VectorXd TrussModel::assemble_mass() const {
  Eigen::VectorXd M = Eigen::VectorXd::Zero(n_dof_);
  for (int i = 0; i < element_count(); ++i) {
    const BarElement& e = elements_[i];
    const double half_mass = e.density * e.area * element_length(i) / 2.0;
    for (int node : {e.node_i, e.node_j}) {
      for (int dir : {0, 1}) {
        const int d = dof_index(node, dir);
        if (d >= 0) M[d] += half_mass;
      }
    }
  }
  return M;
}

double TrussModel::element_stretch(int element_id, const Eigen::VectorXd& shape) const {
  const BarElement& e = elements_.at(element_id);
  const double length = element_length(element_id);
  const double c = (nodes_[e.node_j].x - nodes_[e.node_i].x) / length;
  const double s = (nodes_[e.node_j].y - nodes_[e.node_i].y) / length;

  auto value = [&](int node, int dir) {
    const int d = dof_index(node, dir);
    return d >= 0 ? shape[d] : 0.0;
  };
  return c * (value(e.node_j, 0) - value(e.node_i, 0)) +
         s * (value(e.node_j, 1) - value(e.node_i, 1));
}

TrussModel canonical_truss() {
  constexpr double kE = 70e9;
  constexpr double kA = 0.01;
  constexpr double kRho = 2700.0;
  constexpr int kBays = 4;

  std::vector<Node> nodes;
  for (int k = 0; k <= kBays; ++k) nodes.push_back({k, static_cast<double>(k), 0.0});
  for (int k = 0; k <= kBays; ++k) nodes.push_back({kBays + 1 + k, static_cast<double>(k), 1.0});
  const auto top = [](int k) { return kBays + 1 + k; };

  std::vector<BarElement> elements;
  auto add = [&](int i, int j) {
    elements.push_back({static_cast<int>(elements.size()), i, j, kE, kA, kRho});
  };
  for (int k = 0; k < kBays; ++k) add(k, k + 1);              // bars 1-4, bottom chords
  for (int k = 0; k < kBays; ++k) add(top(k), top(k + 1));    // bars 5-8, top chords
  for (int k = 0; k < kBays; ++k) add(k, top(k));             // bars 9-12, verticals x=0..3
  for (int k = 0; k < kBays; ++k) {                           // bars 13-20, X braces per bay
    add(k, top(k + 1));
    add(top(k), k + 1);
  }

  std::vector<Support> supports = {{0, true, true}, {kBays, true, true}};
  return TrussModel(std::move(nodes), std::move(elements), std::move(supports));
}

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(std::string("model document: missing numeric field '") + key + "'");
  return j[key].get<double>();
}

int require_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument(std::string("model document: missing integer field '") + key + "'");
  return j[key].get<int>();
}

}  // namespace

TrussModel model_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("malformed model document: ") + err.what());
  }
  if (!doc.contains("nodes") || !doc.contains("elements") || !doc.contains("supports"))
    throw std::invalid_argument("model document requires nodes, elements and supports sections");

  std::vector<Node> nodes;
  for (const auto& jn : doc["nodes"])
    nodes.push_back({require_int(jn, "id"), require_number(jn, "x"), require_number(jn, "y")});

  std::vector<BarElement> elements;
  for (const auto& je : doc["elements"])
    elements.push_back({require_int(je, "id"), require_int(je, "i"), require_int(je, "j"),
                        require_number(je, "E"), require_number(je, "A"),
                        require_number(je, "rho")});

  std::vector<Support> supports;
  for (const auto& js : doc["supports"]) {
    Support s{require_int(js, "node"), false, false};
    s.fix_x = js.value("fix_x", false);
    s.fix_y = js.value("fix_y", false);
    supports.push_back(s);
  }
  return TrussModel(std::move(nodes), std::move(elements), std::move(supports));
}

TrussModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json_text(buffer.str());
}

std::string model_to_json_text(const TrussModel& model) {
  json doc;
  doc["nodes"] = json::array();
  for (const Node& n : model.nodes())
    doc["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  doc["elements"] = json::array();
  for (const BarElement& e : model.elements())
    doc["elements"].push_back({{"id", e.id},
                               {"i", e.node_i},
                               {"j", e.node_j},
                               {"E", e.elastic_modulus},
                               {"A", e.area},
                               {"rho", e.density}});
  doc["supports"] = json::array();
  for (const Support& s : model.supports())
    doc["supports"].push_back({{"node", s.node}, {"fix_x", s.fix_x}, {"fix_y", s.fix_y}});
  return doc.dump(2) + "\n";
}

}  // namespace sparsid
