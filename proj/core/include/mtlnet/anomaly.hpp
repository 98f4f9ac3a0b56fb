#pragma once

#include <optional>
#include <string>
#include <variant>

#include "mtlnet/admittance.hpp"
#include "mtlnet/cable.hpp"
#include "mtlnet/network.hpp"
#include "mtlnet/spectrum.hpp"

namespace mtlnet {

/// Shunt admittance (to reference) appearing at `offset` metres from the branch's node_a.
/// Conductor-to-conductor faults are off-diagonal entries of the admittance.
struct LumpedFault {
  std::string branch;
  double offset = 0.0;
  AdmittanceModel admittance;
  bool active = false;  // allow non-passive fault admittances
};

/// Replacement of the load on an existing node.
struct LoadChange {
  std::string node;
  AdmittanceModel new_load;
};

/// Uniformly degraded cable section [start, start + extent] measured from node_a.
struct DistributedFault {
  std::string branch;
  double start = 0.0;
  double extent = 0.0;
  CableSpec degraded;
};

using Anomaly = std::variant<LumpedFault, LoadChange, DistributedFault>;

std::string describe(const Anomaly& anomaly);

/// Returns the perturbed topology. A lumped fault splits its branch at the offset and
/// loads the new node with the fault admittance (at a branch end it is connected in
/// parallel with that node's load); a distributed fault splits the branch into up to
/// three sections, the middle one using the degraded cable. Passivity of lumped faults
/// is checked on `check_grid`.
NetworkTopology apply_anomaly(const NetworkTopology& net, const Anomaly& anomaly,
                              const FrequencyGrid& check_grid = FrequencyGrid::plc_default());

/// Distance along the tree from `node` to where the anomaly starts (nearest point for
/// distributed faults).
double anomaly_distance(const NetworkTopology& net, const Anomaly& anomaly, const std::string& node);

enum class DeltaModel { chain, superposition, superposition_normalized };
enum class DeltaQuantity { ctf, admittance, reflection };

std::string_view to_string(DeltaModel model);
std::string_view to_string(DeltaQuantity quantity);

struct DeltaSpectrum {
  DeltaModel model;
  DeltaQuantity quantity;
  MatrixSpectrum values;
  /// Set for chain deltas of reflection coefficients, whose ratios are unreliable
  /// where the baseline is close to zero.
  std::optional<std::string> warning;
};

/// X_a X^{-1} per frequency.
DeltaSpectrum delta_chain(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline);

/// X_a - X, or (X_a - X) X^{-1} when normalized.
DeltaSpectrum delta_superposition(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline, bool normalize);

}  // namespace mtlnet
