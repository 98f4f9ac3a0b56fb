#pragma once

#include <map>
#include <string>
#include <vector>

#include "mtlnet/admittance.hpp"
#include "mtlnet/cable.hpp"
#include "mtlnet/frequency_grid.hpp"
#include "mtlnet/mtl.hpp"
#include "mtlnet/spectrum.hpp"

namespace mtlnet {

struct Branch {
  std::string id;
  std::string node_a;
  std::string node_b;
  std::string cable;  // key into NetworkTopology::cables
  double length = 0.0;  // m
};

/// A measurement/injection point: the node it sits on and the generator admittance Y_R.
struct Port {
  std::string node;
  AdmittanceModel source;
};

/// Tree of cable sections. Loads may sit on any node; when a port is the active
/// source or sensing point, the load of its own node is disconnected.
struct NetworkTopology {
  std::vector<std::string> nodes;
  std::vector<Branch> branches;
  std::map<std::string, AdmittanceModel> loads;
  std::map<std::string, Port> ports;
  std::map<std::string, CableSpec> cables;

  bool has_node(const std::string& id) const;
  const Branch* find_branch(const std::string& id) const;
  const Port& port(const std::string& name) const;
  /// Conductor count shared by every cable; 0 when there are no cables.
  int conductors() const;
  /// Branch ids incident to a node.
  std::vector<std::string> incident_branches(const std::string& node) const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const noexcept { return violations.empty(); }
};

ValidationReport validate_topology(const NetworkTopology& net);

/// Node sequence and branch sequence of the unique tree path from `from` to `to`.
struct TreePath {
  std::vector<std::string> nodes;
  std::vector<std::string> branches;
};
TreePath tree_path(const NetworkTopology& net, const std::string& from, const std::string& to);

/// Distance along the tree between two nodes (m).
double path_length(const NetworkTopology& net, const std::string& from, const std::string& to);

struct PortReduction {
  MatrixSpectrum y_in;
  /// Equivalent admittance at every node looking away from the port, node load included
  /// (except at the port node itself, which equals y_in).
  std::map<std::string, MatrixSpectrum> node_equivalents;
};

/// Which voltage the end-to-end transfer function is referred to.
enum class CtfReference {
  node_voltage,  // V_rx / V_tx at the transmitter node (chain rule of line transfer functions)
  source_emf,    // V_rx / E where E drives the network through the port admittance Y_R
};

struct EndToEndResult {
  MatrixSpectrum h_total;
  TreePath backbone;
};

/// Solver bound to one validated topology and one grid; caches per-cable modal data.
class NetworkSolver {
 public:
  /// Throws ValidationError when the topology is invalid.
  NetworkSolver(NetworkTopology net, FrequencyGrid grid);

  const NetworkTopology& topology() const noexcept { return net_; }
  const FrequencyGrid& grid() const noexcept { return grid_; }
  const std::vector<PropagationParams>& cable_params(const std::string& cable) const;

  PortReduction reduce_to_port(const std::string& port) const;
  MatrixSpectrum input_reflection(const std::string& port) const;
  /// Same, reusing a reduction already computed for `port`.
  MatrixSpectrum input_reflection(const std::string& port, const PortReduction& reduction) const;
  EndToEndResult end_to_end_ctf(const std::string& tx_port, const std::string& rx_node,
                                CtfReference reference = CtfReference::node_voltage) const;
  /// Source admittance spectrum of a port.
  std::vector<CMatrix> source_admittance(const std::string& port) const;

 private:
  struct RootedTree;
  RootedTree rooted_at(const std::string& root) const;
  // Equivalent admittance of every node seen from the tree root at grid index k.
  std::map<std::string, CMatrix> carry_back(const RootedTree& tree, std::size_t k) const;

  NetworkTopology net_;
  FrequencyGrid grid_;
  int conductors_;
  std::map<std::string, std::vector<PropagationParams>> params_;
};

PortReduction reduce_to_port(const NetworkTopology& net, const std::string& port, const FrequencyGrid& grid);
MatrixSpectrum network_input_reflection(const NetworkTopology& net, const std::string& port,
                                        const FrequencyGrid& grid);
EndToEndResult end_to_end_ctf(const NetworkTopology& net, const std::string& tx_port, const std::string& rx_node,
                              const FrequencyGrid& grid, CtfReference reference = CtfReference::node_voltage);

/// Voltages at the transmitter, the receiver load and the echo returning to the transmitter.
struct PortSignal {
  std::vector<CVector> v_source;
  std::vector<CVector> v_load;
  std::vector<CVector> v_echo;
};

/// V_load = H_tot V_source and V_echo = -Y_R^{-1} rho_in Y_R V_source per frequency.
PortSignal port_signal(const NetworkSolver& solver, const std::string& tx_port, const std::string& rx_node,
                       const std::vector<CVector>& v_source, CtfReference reference = CtfReference::node_voltage);

struct TwoSectionResult {
  MatrixSpectrum y_in;
  MatrixSpectrum rho_in;
};

/// Closed form for two cascaded sections with a load at the end and no junction load:
/// the equivalent load reflection of section 1 is the input reflection of section 2
/// referred to Y_C1, evaluated through the modal mismatch route; section 1 is then
/// evaluated in closed form. Independent of the recursive carry-back.
TwoSectionResult two_section_oracle(const CableSpec& cable1, double length1, const CableSpec& cable2,
                                    double length2, const AdmittanceModel& y_load,
                                    const AdmittanceModel& y_source, const FrequencyGrid& grid);

}  // namespace mtlnet
