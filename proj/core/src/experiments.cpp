#include "mtlnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

enum class Stream : std::uint32_t { topology = 1, fault = 2, backbone = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, std::size_t index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

AdmittanceModel random_load(std::mt19937_64& rng, const LoadDistribution& d, int conductors) {
  ParallelRC rc;
  for (int i = 0; i < conductors; ++i) {
    rc.resistance.push_back(uniform(rng, d.r_min, d.r_max));
    rc.capacitance.push_back(uniform(rng, d.c_min, d.c_max));
  }
  return AdmittanceModel({rc});
}

// Picks a point uniformly along the given branches.
std::pair<const Branch*, double> uniform_point(std::mt19937_64& rng, const NetworkTopology& net,
                                               const std::vector<std::string>& branch_ids) {
  double total = 0.0;
  for (const auto& id : branch_ids) total += net.find_branch(id)->length;
  double u = uniform(rng, 0.0, total);
  const Branch* chosen = net.find_branch(branch_ids.back());
  for (const auto& id : branch_ids) {
    const Branch* b = net.find_branch(id);
    if (u < b->length) {
      chosen = b;
      break;
    }
    u -= b->length;
  }
  // Keep clear of the branch ends so the fault creates a new node.
  const double offset = uniform(rng, 0.02 * chosen->length, 0.98 * chosen->length);
  return {chosen, offset};
}

double band_mean(const MatrixSpectrum& s) {
  double sum = 0.0;
  for (const auto& m : s.values) sum += normalized_magnitude(m);
  return sum / static_cast<double>(s.size());
}

double band_mean_db(const MatrixSpectrum& s) {
  double sum = 0.0;
  for (const auto& m : s.values) sum += 20.0 * std::log10(normalized_magnitude(m));
  return sum / static_cast<double>(s.size());
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

BinStatistics::Stats stats_of(const std::vector<double>& v) {
  BinStatistics::Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.median = quantile(v, 0.5);
  s.q1 = quantile(v, 0.25);
  s.q3 = quantile(v, 0.75);
  return s;
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Envelope over matrix entries: max |x_rc(n)|.
std::vector<double> envelope(const TimeTrace& trace) {
  std::vector<double> e(trace.size());
  for (std::size_t n = 0; n < trace.size(); ++n) e[n] = trace.samples[n].cwiseAbs().maxCoeff();
  return e;
}

bool has_local_max_near(const std::vector<double>& env, std::size_t sample, double tol, double floor,
                        std::size_t guard) {
  const auto lo = static_cast<std::size_t>(std::max(0.0, static_cast<double>(sample) - tol));
  const auto hi = std::min(env.size() - 2, static_cast<std::size_t>(static_cast<double>(sample) + tol));
  for (std::size_t i = std::max<std::size_t>(lo, std::max<std::size_t>(guard, 1)); i <= hi; ++i) {
    if (env[i] >= floor && env[i] >= env[i - 1] && env[i] >= env[i + 1]) return true;
  }
  return false;
}

}  // namespace

void EnsembleConfig::validate() const {
  if (n_networks == 0) throw ValidationError("ensemble: n_networks must be positive");
  if (min_nodes < 2 || max_nodes < min_nodes) throw ValidationError("ensemble: invalid node count range");
  if (!(min_length > 0.0) || max_length < min_length) throw ValidationError("ensemble: invalid length range");
  if (!(loads.r_min > 0.0) || loads.r_max < loads.r_min || loads.c_min < 0.0 || loads.c_max < loads.c_min) {
    throw ValidationError("ensemble: invalid load ranges");
  }
  if (cable_library.empty()) throw ValidationError("ensemble: empty cable library");
  for (const auto& c : cable_library) {
    if (c.conductors() != cable_library.front().conductors()) {
      throw ValidationError("ensemble: cables in the library differ in conductor count");
    }
  }
  if (!(fault_min_conductance > 0.0) || fault_max_conductance < fault_min_conductance) {
    throw ValidationError("ensemble: invalid fault severity range");
  }
  if (n_bins < 3) throw ValidationError("ensemble: at least three distance bins required");
}

AdmittanceModel matched_source(const CableSpec& cable, const FrequencyGrid& grid) {
  const PropagationParams p = propagation_params_at(cable, grid.frequency(grid.size() / 2));
  return AdmittanceModel::constant(p.yc.real().cast<Complex>());
}

NetworkTopology generate_random_network(const EnsembleConfig& cfg, std::size_t index) {
  cfg.validate();
  auto rng = make_rng(cfg.seed, index, Stream::topology);
  const int conductors = cfg.cable_library.front().conductors();
  const auto n = static_cast<std::size_t>(
      std::uniform_int_distribution<std::size_t>(cfg.min_nodes, cfg.max_nodes)(rng));

  NetworkTopology net;
  for (const auto& c : cfg.cable_library) net.cables.emplace(c.label(), c);
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) net.nodes.push_back("n" + std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) {
    const auto parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    const double length = uniform(rng, cfg.min_length, cfg.max_length);
    const auto cable = std::uniform_int_distribution<std::size_t>(0, cfg.cable_library.size() - 1)(rng);
    net.branches.push_back(
        {"b" + std::to_string(i), net.nodes[parent], net.nodes[i], cfg.cable_library[cable].label(), length});
    ++degree[parent];
    ++degree[i];
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (degree[i] == 1) net.loads.emplace(net.nodes[i], random_load(rng, cfg.loads, conductors));
  }

  std::string farthest;
  double best = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    if (degree[i] != 1) continue;
    const double d = path_length(net, net.nodes[0], net.nodes[i]);
    if (d > best) {
      best = d;
      farthest = net.nodes[i];
    }
  }
  const AdmittanceModel source = matched_source(cfg.cable_library.front(), cfg.grid);
  net.loads.emplace(net.nodes[0], source);  // receiving modem
  net.ports.emplace(kReceiverPort, Port{net.nodes[0], source});
  net.ports.emplace(kTransmitterPort, Port{farthest, source});
  return net;
}

LumpedFault random_lumped_fault(const EnsembleConfig& cfg, const NetworkTopology& net, std::size_t index) {
  auto rng = make_rng(cfg.seed, index, Stream::fault);
  std::vector<std::string> ids;
  for (const auto& b : net.branches) ids.push_back(b.id);
  const auto [branch, offset] = uniform_point(rng, net, ids);
  const double g = log_uniform(rng, cfg.fault_min_conductance, cfg.fault_max_conductance);
  return {branch->id, offset, AdmittanceModel::conductance(g, net.conductors()), false};
}

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("spearman: need two equally long samples");
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

namespace {

std::vector<BinStatistics> bin_records(const std::vector<SweepRecord>& records, double SweepRecord::*key,
                                       double upper, std::size_t n_bins) {
  std::vector<BinStatistics> bins(n_bins);
  const double width = upper / static_cast<double>(n_bins);
  std::vector<std::vector<const SweepRecord*>> members(n_bins);
  for (const auto& r : records) {
    const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(r.*key / width));
    members[bin].push_back(&r);
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    BinStatistics& s = bins[b];
    s.lower = static_cast<double>(b) * width;
    s.upper = s.lower + width;
    s.count = members[b].size();
    std::vector<double> y, rho, h;
    for (const auto* r : members[b]) {
      y.push_back(r->delta_admittance);
      rho.push_back(r->delta_reflection);
      h.push_back(r->delta_ctf);
    }
    s.admittance = stats_of(y);
    s.reflection = stats_of(rho);
    s.ctf = stats_of(h);
  }
  return bins;
}

}  // namespace

void summarize_sweep(SweepResult& result, std::size_t n_bins) {
  result.bins.clear();
  result.position_bins.clear();
  if (result.records.empty()) return;
  double d_max = 0.0;
  for (const auto& r : result.records) d_max = std::max(d_max, r.distance);
  result.bins = bin_records(result.records, &SweepRecord::distance, d_max, n_bins);
  result.position_bins = bin_records(result.records, &SweepRecord::path_fraction, 1.0, n_bins);

  std::vector<double> centres, medians;
  double spread_y = 0.0, spread_rho = 0.0;
  std::size_t spread_bins = 0;
  for (const auto& s : result.bins) {
    if (s.count > 0) {
      centres.push_back(0.5 * (s.lower + s.upper));
      medians.push_back(s.admittance.median);
    }
    if (s.count >= 4 && s.admittance.median > 0.0 && s.reflection.median > 0.0) {
      spread_y += (s.admittance.q3 - s.admittance.q1) / s.admittance.median;
      spread_rho += (s.reflection.q3 - s.reflection.q1) / s.reflection.median;
      ++spread_bins;
    }
  }
  result.spearman_admittance = centres.size() >= 2 ? spearman_correlation(centres, medians) : 0.0;
  result.spread_admittance = spread_bins ? spread_y / static_cast<double>(spread_bins) : 0.0;
  result.spread_reflection = spread_bins ? spread_rho / static_cast<double>(spread_bins) : 0.0;
}

bool ctf_u_shape(const SweepResult& result) {
  const auto& bins = result.position_bins;
  if (bins.size() < 3) return false;
  const std::size_t n = bins.size();
  double middle = bins[n / 2].ctf.mean;
  if (n % 2 == 0) middle = 0.5 * (middle + bins[n / 2 - 1].ctf.mean);
  return bins.front().count > 0 && bins.back().count > 0 && bins.front().ctf.mean > middle &&
         bins.back().ctf.mean > middle;
}

SweepResult run_distance_sweep(const EnsembleConfig& cfg) {
  cfg.validate();
  SweepResult result;
  for (std::size_t i = 0; i < cfg.n_networks; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const LumpedFault fault = random_lumped_fault(cfg, net, i);
    const std::string rx_node = net.port(kReceiverPort).node;
    try {
      const NetworkSolver base(net, cfg.grid);
      const NetworkSolver faulty(apply_anomaly(net, fault, cfg.grid), cfg.grid);
      const PortReduction red = base.reduce_to_port(kReceiverPort);
      const PortReduction red_a = faulty.reduce_to_port(kReceiverPort);
      const auto& y = red.y_in;
      const auto& y_a = red_a.y_in;
      const auto rho = base.input_reflection(kReceiverPort, red);
      const auto rho_a = faulty.input_reflection(kReceiverPort, red_a);
      const auto h = base.end_to_end_ctf(kTransmitterPort, rx_node, CtfReference::source_emf).h_total;
      const auto h_a = faulty.end_to_end_ctf(kTransmitterPort, rx_node, CtfReference::source_emf).h_total;
      SweepRecord rec;
      rec.network = i;
      rec.anomaly = describe(fault);
      rec.distance = anomaly_distance(net, fault, rx_node);
      rec.path_fraction =
          std::min(1.0, rec.distance / path_length(net, rx_node, net.port(kTransmitterPort).node));
      rec.delta_admittance = band_mean(delta_superposition(y_a, y, true).values);
      rec.delta_reflection = band_mean(delta_superposition(rho_a, rho, true).values);
      rec.delta_ctf = band_mean(delta_superposition(h_a, h, true).values);
      result.records.push_back(std::move(rec));
    } catch (const NumericalError&) {
      ++result.skipped;
    }
  }
  summarize_sweep(result, cfg.n_bins);
  return result;
}

double BackboneLateralResult::mean_backbone_db() const {
  return backbone_db.empty() ? 0.0
                             : std::accumulate(backbone_db.begin(), backbone_db.end(), 0.0) /
                                   static_cast<double>(backbone_db.size());
}

double BackboneLateralResult::mean_lateral_db() const {
  return lateral_db.empty() ? 0.0
                            : std::accumulate(lateral_db.begin(), lateral_db.end(), 0.0) /
                                  static_cast<double>(lateral_db.size());
}

BackboneLateralResult run_backbone_lateral(const EnsembleConfig& cfg) {
  cfg.validate();
  BackboneLateralResult result;
  for (std::size_t i = 0; i < cfg.n_networks; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const std::string rx_node = net.port(kReceiverPort).node;
    const TreePath backbone = tree_path(net, net.port(kTransmitterPort).node, rx_node);
    std::vector<std::string> lateral;
    for (const auto& b : net.branches) {
      if (std::find(backbone.branches.begin(), backbone.branches.end(), b.id) == backbone.branches.end()) {
        lateral.push_back(b.id);
      }
    }
    if (lateral.empty()) continue;

    auto rng = make_rng(cfg.seed, i, Stream::backbone);
    const double g = log_uniform(rng, cfg.fault_min_conductance, cfg.fault_max_conductance);
    const auto on_backbone = uniform_point(rng, net, backbone.branches);
    const auto on_lateral = uniform_point(rng, net, lateral);
    const int n = net.conductors();
    try {
      const NetworkSolver base(net, cfg.grid);
      const auto h = base.end_to_end_ctf(kTransmitterPort, rx_node, CtfReference::source_emf).h_total;
      auto chain_db = [&](const std::pair<const Branch*, double>& where) {
        const LumpedFault fault{where.first->id, where.second, AdmittanceModel::conductance(g, n), false};
        const NetworkSolver faulty(apply_anomaly(net, fault, cfg.grid), cfg.grid);
        const auto h_a = faulty.end_to_end_ctf(kTransmitterPort, rx_node, CtfReference::source_emf).h_total;
        return band_mean_db(delta_chain(h_a, h).values);
      };
      const double bb = chain_db(on_backbone);
      const double lat = chain_db(on_lateral);
      result.backbone_db.push_back(bb);
      result.lateral_db.push_back(lat);
    } catch (const NumericalError&) {
      ++result.skipped;
    }
  }
  return result;
}

std::string_view to_string(PeakChange change) {
  switch (change) {
    case PeakChange::new_peak: return "new-peak";
    case PeakChange::amplitude_only: return "amplitude-only";
    case PeakChange::shifted_peak: return "shifted-peak";
    case PeakChange::unchanged: return "unchanged";
  }
  return "unknown";
}

PeakDiff classify_peak_changes(const TimeTrace& baseline, const TimeTrace& perturbed, const PeakDiffOptions& options) {
  const std::size_t sep = std::max<std::size_t>(options.peaks.min_separation, 1);
  const std::vector<Peak> base = detect_peaks(baseline, options.peaks).aggregated(sep);
  const std::vector<Peak> pert = detect_peaks(perturbed, options.peaks).aggregated(sep);
  const std::vector<double> env_base = envelope(baseline);
  const std::vector<double> env_pert = envelope(perturbed);
  const double floor_base = options.existence_floor * *std::max_element(env_base.begin(), env_base.end());
  const double floor_pert = options.existence_floor * *std::max_element(env_pert.begin(), env_pert.end());
  const double tol = options.tolerance_samples;

  PeakDiff diff;
  std::vector<bool> used(pert.size(), false);
  auto gap = [](const Peak& a, const Peak& b) {
    return std::abs(static_cast<double>(a.sample) - static_cast<double>(b.sample));
  };
  auto nearest_unused = [&](const Peak& b, double window) {
    std::size_t best = pert.size();
    double best_gap = window + 1e-9;
    for (std::size_t j = 0; j < pert.size(); ++j) {
      if (!used[j] && gap(b, pert[j]) <= best_gap) {
        best_gap = gap(b, pert[j]);
        best = j;
      }
    }
    return best;
  };

  // Exact matches first so that shifts cannot steal a peak that stayed in place.
  std::vector<bool> matched(base.size(), false);
  for (std::size_t i = 0; i < base.size(); ++i) {
    const std::size_t j = nearest_unused(base[i], tol);
    if (j == pert.size()) continue;
    used[j] = true;
    matched[i] = true;
    const double scale = std::max(std::abs(base[i].amplitude), std::abs(pert[j].amplitude));
    if (std::abs(base[i].amplitude - pert[j].amplitude) > options.amplitude_tolerance * scale) {
      ++diff.amplitude_changes;
    }
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (matched[i]) continue;
    if (has_local_max_near(env_pert, base[i].sample, tol, floor_pert, sep)) {
      ++diff.amplitude_changes;  // still there, fell below the detection threshold
      continue;
    }
    const std::size_t j = nearest_unused(base[i], options.shift_window_samples);
    if (j != pert.size()) {
      used[j] = true;
      diff.shifted.emplace_back(base[i], pert[j]);
    } else {
      diff.vanished.push_back(base[i]);
    }
  }
  for (std::size_t j = 0; j < pert.size(); ++j) {
    if (used[j]) continue;
    if (has_local_max_near(env_base, pert[j].sample, tol, floor_base, sep)) {
      ++diff.amplitude_changes;  // an existing peak grew above the threshold
    } else {
      diff.new_peaks.push_back(pert[j]);
    }
  }

  if (!diff.new_peaks.empty()) diff.classes.insert(PeakChange::new_peak);
  if (!diff.shifted.empty()) diff.classes.insert(PeakChange::shifted_peak);
  if (diff.classes.empty()) {
    diff.classes.insert((diff.amplitude_changes > 0 || !diff.vanished.empty()) ? PeakChange::amplitude_only
                                                                                : PeakChange::unchanged);
  }
  return diff;
}

std::set<PeakChange> expected_signature(const Anomaly& anomaly) {
  if (std::holds_alternative<LumpedFault>(anomaly)) return {PeakChange::new_peak};
  if (std::holds_alternative<LoadChange>(anomaly)) return {PeakChange::amplitude_only};
  return {PeakChange::shifted_peak, PeakChange::new_peak};
}

std::vector<ScenarioOutcome> run_scenario_suite(const NetworkTopology& base, const std::string& sensing_port,
                                                const std::vector<Scenario>& scenarios, const FrequencyGrid& grid,
                                                const PeakDiffOptions& options) {
  const NetworkSolver base_solver(base, grid);
  const MatrixSpectrum y = base_solver.reduce_to_port(sensing_port).y_in;
  const TimeTrace y_trace = to_time_domain(y, Window::hann, "baseline");

  std::vector<ScenarioOutcome> out;
  for (const auto& sc : scenarios) {
    const NetworkSolver solver(apply_anomaly(base, sc.anomaly, grid), grid);
    MatrixSpectrum y_a = solver.reduce_to_port(sensing_port).y_in;
    DeltaSpectrum chain = delta_chain(y_a, y);
    DeltaSpectrum sup = delta_superposition(y_a, y, false);
    TimeTrace y_a_trace = to_time_domain(y_a, Window::hann, sc.name);
    TimeTrace sup_trace = to_time_domain(sup.values, Window::hann, sc.name + ":superposition");
    PeakDiff diff = classify_peak_changes(y_trace, y_a_trace, options);
    std::set<PeakChange> expected = expected_signature(sc.anomaly);
    const bool ok = diff.classes == expected;
    std::string note;
    if (!diff.vanished.empty()) note += std::to_string(diff.vanished.size()) + " baseline peak(s) vanished; ";
    if (!ok) {
      note += "observed";
      for (auto c : diff.classes) note += " " + std::string(to_string(c));
    }
    out.push_back(ScenarioOutcome{sc.name, describe(sc.anomaly), y, std::move(y_a), std::move(chain), std::move(sup),
                                  y_trace, std::move(y_a_trace), std::move(sup_trace), std::move(diff),
                                  std::move(expected), ok, std::move(note)});
  }
  return out;
}

NetworkTopology single_line_network(int conductors, double length) {
  const CableSpec cable = CableSpec::default_cable(conductors);
  NetworkTopology net;
  net.nodes = {"n0", "n1"};
  net.cables.emplace(cable.label(), cable);
  net.branches.push_back({"b1", "n0", "n1", cable.label(), length});
  net.loads.emplace("n1", AdmittanceModel::conductance(1.0 / 300.0, conductors));
  net.ports.emplace("in", Port{"n0", matched_source(cable, FrequencyGrid::plc_default())});
  return net;
}

std::vector<Scenario> single_line_scenarios(int conductors, double length) {
  CoupledCableModel damaged;
  damaged.conductors = conductors;
  damaged.c *= 1.4;
  damaged.r0 *= 2.0;
  damaged.loss_tangent *= 20.0;
  return {
      {"load-change", LoadChange{"n1", AdmittanceModel::conductance(1.0 / 30.0, conductors)}},
      {"lumped-fault", LumpedFault{"b1", 0.5 * length, AdmittanceModel::conductance(0.05, conductors), false}},
      {"distributed-fault", DistributedFault{"b1", 0.3 * length, 0.3 * length, CableSpec("damaged", damaged)}},
  };
}

}  // namespace mtlnet
