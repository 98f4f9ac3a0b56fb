#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mtlnet/anomaly.hpp"
#include "mtlnet/cable.hpp"
#include "mtlnet/frequency_grid.hpp"
#include "mtlnet/network.hpp"
#include "mtlnet/spectral.hpp"

namespace mtlnet {

/// Leaf loads: per-conductor parallel RC with R and C drawn uniformly.
struct LoadDistribution {
  double r_min = 10.0;      // Ohm
  double r_max = 1000.0;    // Ohm
  double c_min = 1e-9;      // F
  double c_max = 100e-9;    // F
};

struct EnsembleConfig {
  std::size_t n_networks = 200;
  std::size_t min_nodes = 4;
  std::size_t max_nodes = 12;
  double min_length = 10.0;   // m
  double max_length = 100.0;  // m
  LoadDistribution loads;
  std::vector<CableSpec> cable_library{CableSpec::default_cable(2)};
  /// Fault severity: shunt conductance per conductor, drawn log-uniformly (S).
  double fault_min_conductance = 1e-3;
  double fault_max_conductance = 1e-1;
  std::uint64_t seed = 1;
  FrequencyGrid grid = FrequencyGrid::plc_default();
  std::size_t n_bins = 8;

  /// Throws ValidationError for empty ranges or an empty cable library.
  void validate() const;
};

/// Port names used by generated networks.
inline constexpr const char* kReceiverPort = "rx";
inline constexpr const char* kTransmitterPort = "tx";

/// Generator admittance of a modem matched to `cable` at mid band: Re(Y_C(f_mid)).
AdmittanceModel matched_source(const CableSpec& cable, const FrequencyGrid& grid);

/// Random tree: node i > 0 attaches to a uniformly chosen earlier node. Leaves carry random
/// loads and the receiver node n0 a matched modem load; port "rx" sits on n0 and port "tx"
/// on the leaf farthest from n0. Deterministic in (cfg.seed, index).
NetworkTopology generate_random_network(const EnsembleConfig& cfg, std::size_t index);

/// Random lumped fault placed uniformly along the network (branch chosen with
/// probability proportional to its length). Deterministic in (cfg.seed, index).
LumpedFault random_lumped_fault(const EnsembleConfig& cfg, const NetworkTopology& net, std::size_t index);

struct SweepRecord {
  std::size_t network = 0;
  std::string anomaly;
  double distance = 0.0;  // m from the receiver / sensing node
  double path_fraction = 0.0;  // distance / receiver-to-transmitter distance, in [0, 1]
  double delta_admittance = 0.0;  // band mean of |(Y_a - Y) Y^{-1}|
  double delta_reflection = 0.0;  // band mean of |(rho_a - rho) rho^{-1}|
  double delta_ctf = 0.0;         // band mean of |(H_a - H) H^{-1}|
};

struct BinStatistics {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  struct Stats {
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
  } admittance, reflection, ctf;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<BinStatistics> bins;           // by distance over [0, max distance]
  std::vector<BinStatistics> position_bins;  // by path fraction over [0, 1]
  std::size_t skipped = 0;
  /// Spearman correlation of per-bin median admittance delta against bin centre.
  double spearman_admittance = 0.0;
  /// Mean over populated bins of (q3 - q1) / median.
  double spread_admittance = 0.0;
  double spread_reflection = 0.0;
};

/// One random lumped fault per network; deltas of Y_in and rho_in at the receiver port and
/// of the source-referred CTF from the farthest leaf to the receiver.
SweepResult run_distance_sweep(const EnsembleConfig& cfg);

/// Bins records and fills the summary statistics of `result`.
void summarize_sweep(SweepResult& result, std::size_t n_bins);

/// True when the mean CTF delta of the first and last position bins both exceed
/// that of the middle bin(s).
bool ctf_u_shape(const SweepResult& result);

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct BackboneLateralResult {
  std::vector<double> backbone_db;  // band mean of 20 log10 |Delta_ch^H| per network
  std::vector<double> lateral_db;
  std::size_t skipped = 0;
  double mean_backbone_db() const;
  double mean_lateral_db() const;
};

/// For each generated network with at least one lateral branch, places one fault on the
/// backbone and one on a lateral branch and records the chain CTF delta in dB.
BackboneLateralResult run_backbone_lateral(const EnsembleConfig& cfg);

enum class PeakChange { new_peak, amplitude_only, shifted_peak, unchanged };
std::string_view to_string(PeakChange change);

struct PeakDiff {
  std::vector<Peak> new_peaks;
  std::vector<std::pair<Peak, Peak>> shifted;  // baseline, perturbed
  std::vector<Peak> vanished;
  std::size_t amplitude_changes = 0;
  std::set<PeakChange> classes;
};

struct PeakDiffOptions {
  PeakOptions peaks;
  double tolerance_samples = 1.0;
  /// A baseline peak that moved by more than the tolerance but less than this is "shifted".
  double shift_window_samples = 25.0;
  /// Local maxima of the other trace above this fraction of its maximum confirm that a
  /// peak already existed (amplitude change rather than new peak).
  double existence_floor = 0.005;
  double amplitude_tolerance = 1e-3;
};

/// Compares peak sets of a baseline and a perturbed trace (aggregated over entries).
PeakDiff classify_peak_changes(const TimeTrace& baseline, const TimeTrace& perturbed,
                               const PeakDiffOptions& options = {});

struct Scenario {
  std::string name;
  Anomaly anomaly;
};

struct ScenarioOutcome {
  std::string name;
  std::string anomaly;
  MatrixSpectrum baseline;   // Y_in at the sensing port
  MatrixSpectrum perturbed;
  DeltaSpectrum chain;
  DeltaSpectrum superposition;
  TimeTrace baseline_trace;
  TimeTrace perturbed_trace;
  TimeTrace superposition_trace;
  PeakDiff diff;
  std::set<PeakChange> expected;
  bool rule_satisfied = false;
  std::string note;  // ambiguity report, empty when clean
};

/// Expected peak signature: lumped fault -> new peaks; load change -> amplitude only;
/// distributed fault -> shifted and new peaks.
std::set<PeakChange> expected_signature(const Anomaly& anomaly);

/// Reflectometric scenario comparison at `sensing_port`.
std::vector<ScenarioOutcome> run_scenario_suite(const NetworkTopology& base, const std::string& sensing_port,
                                                const std::vector<Scenario>& scenarios, const FrequencyGrid& grid,
                                                const PeakDiffOptions& options = {});

/// Single line with a resistive far-end load, sensing port at the near end.
NetworkTopology single_line_network(int conductors = 2, double length = 150.0);

/// Load change, mid-line lumped fault and a 30 % distributed fault on single_line_network().
std::vector<Scenario> single_line_scenarios(int conductors = 2, double length = 150.0);

}  // namespace mtlnet
