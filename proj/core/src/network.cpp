#include "mtlnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

struct Adjacency {
  std::map<std::string, std::vector<std::pair<const Branch*, std::string>>> edges;

  explicit Adjacency(const NetworkTopology& net) {
    for (const auto& n : net.nodes) edges[n];
    for (const auto& b : net.branches) {
      edges[b.node_a].emplace_back(&b, b.node_b);
      edges[b.node_b].emplace_back(&b, b.node_a);
    }
  }
};

// Breadth-first order from `root` with the branch leading to each node's parent.
struct BfsTree {
  std::vector<std::string> order;
  std::map<std::string, const Branch*> parent_branch;
  std::map<std::string, std::string> parent;
};

BfsTree root_tree(const Adjacency& adj, const std::string& root) {
  BfsTree tree;
  std::deque<std::string> queue{root};
  std::set<std::string> seen{root};
  while (!queue.empty()) {
    std::string node = queue.front();
    queue.pop_front();
    tree.order.push_back(node);
    const auto it = adj.edges.find(node);
    if (it == adj.edges.end()) continue;
    for (const auto& [branch, next] : it->second) {
      if (seen.insert(next).second) {
        tree.parent_branch[next] = branch;
        tree.parent[next] = node;
        queue.push_back(next);
      }
    }
  }
  return tree;
}

template <typename Fn>
auto with_context(std::string_view kind, const std::string& id, double f, Fn&& fn) {
  const auto context = [&] { return std::string(kind) + " '" + id + "'"; };
  try {
    return fn();
  } catch (const SingularityError& e) {
    throw SingularityError(context() + ": " + e.what(), f);
  } catch (const DecompositionError& e) {
    throw DecompositionError(context() + ": " + e.what(), f);
  } catch (const NumericalError& e) {
    throw NumericalError(context() + ": " + e.what(), f);
  }
}

}  // namespace

bool NetworkTopology::has_node(const std::string& id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

const Branch* NetworkTopology::find_branch(const std::string& id) const {
  const auto it = std::find_if(branches.begin(), branches.end(), [&](const Branch& b) { return b.id == id; });
  return it == branches.end() ? nullptr : &*it;
}

const Port& NetworkTopology::port(const std::string& name) const {
  const auto it = ports.find(name);
  if (it == ports.end()) throw ValidationError("unknown port '" + name + "'");
  return it->second;
}

int NetworkTopology::conductors() const {
  return cables.empty() ? 0 : cables.begin()->second.conductors();
}

std::vector<std::string> NetworkTopology::incident_branches(const std::string& node) const {
  std::vector<std::string> out;
  for (const auto& b : branches) {
    if (b.node_a == node || b.node_b == node) out.push_back(b.id);
  }
  return out;
}

ValidationReport validate_topology(const NetworkTopology& net) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  std::set<std::string> node_set;
  for (const auto& n : net.nodes) {
    if (n.empty()) fail("empty node id");
    if (!node_set.insert(n).second) fail("duplicate node '" + n + "'");
  }
  if (net.nodes.size() < 2) fail("network needs at least two nodes");

  int conductors = 0;
  for (const auto& [id, cable] : net.cables) {
    if (conductors == 0) conductors = cable.conductors();
    if (cable.conductors() != conductors) fail("cable '" + id + "' has a different conductor count");
  }

  std::set<std::string> branch_ids;
  bool endpoints_ok = true;
  for (const auto& b : net.branches) {
    if (!branch_ids.insert(b.id).second) fail("duplicate branch '" + b.id + "'");
    if (!node_set.count(b.node_a) || !node_set.count(b.node_b)) {
      fail("branch '" + b.id + "' references an unknown node");
      endpoints_ok = false;
    }
    if (b.node_a == b.node_b) fail("branch '" + b.id + "' is a self loop");
    if (!(b.length > 0.0) || !std::isfinite(b.length)) fail("branch '" + b.id + "' must have positive length");
    if (!net.cables.count(b.cable)) fail("branch '" + b.id + "' references unknown cable '" + b.cable + "'");
  }

  if (net.branches.size() + 1 != net.nodes.size()) {
    fail("not a tree: " + std::to_string(net.branches.size()) + " branches for " +
         std::to_string(net.nodes.size()) + " nodes");
  }
  if (endpoints_ok && !net.nodes.empty()) {
    const Adjacency adj(net);
    const BfsTree tree = root_tree(adj, net.nodes.front());
    if (tree.order.size() != node_set.size()) fail("not connected");
    for (const auto& n : net.nodes) {
      const auto degree = adj.edges.at(n).size();
      if (degree != 1) continue;
      const bool has_port = std::any_of(net.ports.begin(), net.ports.end(),
                                        [&](const auto& p) { return p.second.node == n; });
      if (!net.loads.count(n) && !has_port) fail("dangling leaf '" + n + "' has neither load nor port");
    }
  }

  for (const auto& [node, load] : net.loads) {
    if (!node_set.count(node)) fail("load on unknown node '" + node + "'");
    if (load.conductors() != 0 && conductors != 0 && load.conductors() != conductors) {
      fail("load on '" + node + "' has the wrong conductor count");
    }
  }
  for (const auto& [name, port] : net.ports) {
    if (!node_set.count(port.node)) fail("port '" + name + "' on unknown node '" + port.node + "'");
    if (port.source.conductors() != 0 && conductors != 0 && port.source.conductors() != conductors) {
      fail("port '" + name + "' source admittance has the wrong conductor count");
    }
  }
  return report;
}

TreePath tree_path(const NetworkTopology& net, const std::string& from, const std::string& to) {
  if (!net.has_node(from) || !net.has_node(to)) throw ValidationError("tree_path: unknown node");
  const Adjacency adj(net);
  const BfsTree tree = root_tree(adj, from);
  if (from != to && !tree.parent.count(to)) throw ValidationError("tree_path: nodes are not connected");
  TreePath path;
  for (std::string cur = to; cur != from; cur = tree.parent.at(cur)) {
    path.nodes.push_back(cur);
    path.branches.push_back(tree.parent_branch.at(cur)->id);
  }
  path.nodes.push_back(from);
  std::reverse(path.nodes.begin(), path.nodes.end());
  std::reverse(path.branches.begin(), path.branches.end());
  return path;
}

double path_length(const NetworkTopology& net, const std::string& from, const std::string& to) {
  double total = 0.0;
  for (const auto& id : tree_path(net, from, to).branches) total += net.find_branch(id)->length;
  return total;
}

NetworkSolver::NetworkSolver(NetworkTopology net, FrequencyGrid grid)
    : net_(std::move(net)), grid_(grid), conductors_(net_.conductors()) {
  const ValidationReport report = validate_topology(net_);
  if (!report.valid()) throw ValidationError("invalid topology: " + report.violations.front());
  for (const auto& b : net_.branches) {
    if (!params_.count(b.cable)) params_.emplace(b.cable, line_propagation_params(net_.cables.at(b.cable), grid_));
  }
}

const std::vector<PropagationParams>& NetworkSolver::cable_params(const std::string& cable) const {
  const auto it = params_.find(cable);
  if (it == params_.end()) throw ValidationError("cable '" + cable + "' is not used by the network");
  return it->second;
}

std::vector<CMatrix> NetworkSolver::source_admittance(const std::string& port) const {
  const Port& p = net_.port(port);
  std::vector<CMatrix> out(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) out[k] = p.source.evaluate(grid_.frequency(k), conductors_);
  return out;
}

struct NetworkSolver::RootedTree {
  std::string root;
  BfsTree bfs;
};

NetworkSolver::RootedTree NetworkSolver::rooted_at(const std::string& root) const {
  return {root, root_tree(Adjacency(net_), root)};
}

std::map<std::string, CMatrix> NetworkSolver::carry_back(const RootedTree& rooted, std::size_t k) const {
  const double f = grid_.frequency(k);
  const std::string& root = rooted.root;
  const BfsTree& tree = rooted.bfs;
  std::map<std::string, CMatrix> eq;
  for (const auto& node : tree.order) {
    const auto load = net_.loads.find(node);
    eq[node] = (load != net_.loads.end() && node != root) ? load->second.evaluate(f, conductors_)
                                                           : CMatrix::Zero(conductors_, conductors_);
  }
  for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
    if (*it == root) continue;
    const Branch& b = *tree.parent_branch.at(*it);
    const PropagationParams& p = params_.at(b.cable)[k];
    eq[tree.parent.at(*it)] += with_context("branch", b.id, f, [&] {
      const CMatrix rho_modal = p.t_inv * load_reflection(eq.at(*it), p.yc) * p.t;
      return input_admittance_line(p, b.length, rho_modal);
    });
  }
  return eq;
}

PortReduction NetworkSolver::reduce_to_port(const std::string& port) const {
  const std::string root = net_.port(port).node;
  const RootedTree tree = rooted_at(root);
  std::map<std::string, std::vector<CMatrix>> per_node;
  for (const auto& n : net_.nodes) per_node[n].resize(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    for (auto& [node, m] : carry_back(tree, k)) per_node[node][k] = std::move(m);
  }
  PortReduction out{MatrixSpectrum(grid_, per_node.at(root), SpectrumKind::admittance), {}};
  for (auto& [node, values] : per_node) {
    out.node_equivalents.emplace(node, MatrixSpectrum(grid_, std::move(values), SpectrumKind::admittance));
  }
  return out;
}

MatrixSpectrum NetworkSolver::input_reflection(const std::string& port) const {
  return input_reflection(port, reduce_to_port(port));
}

MatrixSpectrum NetworkSolver::input_reflection(const std::string& port, const PortReduction& red) const {
  const std::vector<CMatrix> y_r = source_admittance(port);
  std::vector<CMatrix> rho(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    rho[k] = with_context("port", port, grid_.frequency(k),
                          [&] { return mtlnet::input_reflection(red.y_in[k], y_r[k]); });
  }
  return MatrixSpectrum(grid_, std::move(rho), SpectrumKind::reflection);
}

EndToEndResult NetworkSolver::end_to_end_ctf(const std::string& tx_port, const std::string& rx_node,
                                             CtfReference reference) const {
  const std::string tx_node = net_.port(tx_port).node;
  if (!net_.has_node(rx_node)) throw ValidationError("unknown receiver node '" + rx_node + "'");
  if (!net_.loads.count(rx_node)) throw ValidationError("receiver node '" + rx_node + "' carries no load");
  if (rx_node == tx_node) throw ValidationError("receiver coincides with the transmitter node");

  TreePath backbone = tree_path(net_, tx_node, rx_node);
  std::vector<CMatrix> y_r;
  if (reference == CtfReference::source_emf) y_r = source_admittance(tx_port);

  const RootedTree tree = rooted_at(tx_node);
  std::vector<CMatrix> h(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const double f = grid_.frequency(k);
    const auto eq = carry_back(tree, k);
    CMatrix total = CMatrix::Identity(conductors_, conductors_);
    for (std::size_t s = 0; s < backbone.branches.size(); ++s) {
      const Branch& b = *net_.find_branch(backbone.branches[s]);
      const PropagationParams& p = params_.at(b.cable)[k];
      const CMatrix& far_end = eq.at(backbone.nodes[s + 1]);
      total = with_context("segment", b.id, f, [&] {
                return ctf_line(p, b.length, load_reflection(far_end, p.yc));
              }) * total;
    }
    if (reference == CtfReference::source_emf) {
      // V_tx = (Y_in + Y_R)^{-1} Y_R E
      total = total * with_context("port", tx_port, f,
                                   [&] { return solve_left(eq.at(tx_node) + y_r[k], y_r[k], "Y_in + Y_R"); });
    }
    h[k] = std::move(total);
  }
  return {MatrixSpectrum(grid_, std::move(h), SpectrumKind::ctf), std::move(backbone)};
}

PortReduction reduce_to_port(const NetworkTopology& net, const std::string& port, const FrequencyGrid& grid) {
  return NetworkSolver(net, grid).reduce_to_port(port);
}

MatrixSpectrum network_input_reflection(const NetworkTopology& net, const std::string& port,
                                        const FrequencyGrid& grid) {
  return NetworkSolver(net, grid).input_reflection(port);
}

EndToEndResult end_to_end_ctf(const NetworkTopology& net, const std::string& tx_port, const std::string& rx_node,
                              const FrequencyGrid& grid, CtfReference reference) {
  return NetworkSolver(net, grid).end_to_end_ctf(tx_port, rx_node, reference);
}

PortSignal port_signal(const NetworkSolver& solver, const std::string& tx_port, const std::string& rx_node,
                       const std::vector<CVector>& v_source, CtfReference reference) {
  const FrequencyGrid& grid = solver.grid();
  if (v_source.size() != grid.size()) throw ValidationError("port_signal: one source vector per frequency required");
  const MatrixSpectrum h = solver.end_to_end_ctf(tx_port, rx_node, reference).h_total;
  const MatrixSpectrum rho = solver.input_reflection(tx_port);
  const std::vector<CMatrix> y_r = solver.source_admittance(tx_port);
  PortSignal out{v_source, {}, {}};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out.v_load.push_back(h[k] * v_source[k]);
    out.v_echo.push_back(echo_voltage(rho[k], y_r[k], v_source[k]));
  }
  return out;
}

TwoSectionResult two_section_oracle(const CableSpec& cable1, double length1, const CableSpec& cable2,
                                    double length2, const AdmittanceModel& y_load,
                                    const AdmittanceModel& y_source, const FrequencyGrid& grid) {
  if (cable1.conductors() != cable2.conductors()) throw ValidationError("two_section_oracle: conductor mismatch");
  if (length1 < 0.0 || length2 < 0.0) throw RangeError("two_section_oracle: negative length");
  const int n = cable1.conductors();
  std::vector<CMatrix> y_in(grid.size()), rho_in(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f = grid.frequency(k);
    const PropagationParams p1 = propagation_params_at(cable1, f);
    const PropagationParams p2 = propagation_params_at(cable2, f);
    const CMatrix rho_l_modal2 = p2.t_inv * load_reflection(y_load.evaluate(f, n), p2.yc) * p2.t;
    // Equivalent load reflection of section 1: input reflection of section 2 with Y_C1 as reference.
    const CMatrix rho_1 = line_input_reflection(p2, length2, rho_l_modal2, p1.yc, ReflectionRoute::modal);
    const CMatrix rho_1_modal = p1.t_inv * rho_1 * p1.t;
    y_in[k] = input_admittance_line(p1, length1, rho_1_modal);
    rho_in[k] = line_input_reflection(p1, length1, rho_1_modal, y_source.evaluate(f, n), ReflectionRoute::modal);
  }
  return {MatrixSpectrum(grid, std::move(y_in), SpectrumKind::admittance),
          MatrixSpectrum(grid, std::move(rho_in), SpectrumKind::reflection)};
}

}  // namespace mtlnet
