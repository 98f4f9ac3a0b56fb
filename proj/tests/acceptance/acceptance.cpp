#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "mtlnet/experiments.hpp"
#include "mtlnet/mtl.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mtlnet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

CableSpec scalar_cable(double r, double l, double g, double c) {
  return CableSpec("scalar", ConstantCableModel{RMatrix::Constant(1, 1, r), RMatrix::Constant(1, 1, l),
                                                RMatrix::Constant(1, 1, g), RMatrix::Constant(1, 1, c)});
}

CMatrix random_load(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> g(0.002, 0.05), b(-0.02, 0.02), off(-0.002, 0.002);
  CMatrix y(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      y(i, j) = i == j ? Complex(g(rng), b(rng)) : Complex(off(rng), off(rng));
      y(j, i) = y(i, j);
    }
  }
  return y;
}

double fastest(const NetworkTopology& net, const FrequencyGrid& grid) {
  double v = 0.0;
  for (const auto& [name, cable] : net.cables) v = std::max(v, modal_velocities(cable, grid.f_max()).front());
  return v;
}

std::vector<std::string> leaves(const NetworkTopology& net) {
  std::vector<std::string> out;
  for (const auto& n : net.nodes) {
    if (net.incident_branches(n).size() == 1) out.push_back(n);
  }
  return out;
}

std::string farthest(const NetworkTopology& net, const std::string& from, const std::vector<std::string>& among) {
  return *std::max_element(among.begin(), among.end(), [&](const std::string& a, const std::string& b) {
    return path_length(net, from, a) < path_length(net, from, b);
  });
}

Outcome reflection_extremes() {
  double worst_matched = 0, worst_open = 0, worst_short = 0;
  for (int n : {1, 2, 3, 4}) {
    for (double f : {1e5, 5e6, 8e7}) {
      const PropagationParams p = propagation_params_at(CableSpec::default_cable(n), f);
      const CMatrix id = CMatrix::Identity(n, n);
      worst_matched = std::max(worst_matched, load_reflection(p.yc, p.yc).norm());
      worst_open = std::max(worst_open, (load_reflection(CMatrix::Zero(n, n), p.yc) + id).norm());
      worst_short = std::max(worst_short, (load_reflection(id * 1e12, p.yc) - id).norm());
    }
  }
  return {worst_matched <= 1e-12 && worst_open <= 1e-12 && worst_short <= 1e-7,
          fmt::format("matched {:.1e}, open {:.1e}, short {:.1e}", worst_matched, worst_open, worst_short)};
}

Outcome line_identities() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int n : {1, 2, 3}) {
    for (double f : {2e5, 7e6, 6e7}) {
      const PropagationParams p = propagation_params_at(CableSpec::default_cable(n), f);
      const CMatrix y_l = random_load(rng, n);
      const CMatrix rho = load_reflection(y_l, p.yc);
      const CMatrix rho_m = modal_transform(rho, p, ModalDirection::to_modal);
      const CMatrix zero = CMatrix::Zero(n, n);
      worst = std::max(worst, relative_difference(input_admittance_line(p, 0.0, rho_m), y_l));
      worst = std::max(worst, relative_difference(input_admittance_line(p, 73.0, zero), p.yc));
      worst = std::max(worst, relative_difference(ctf_line(p, 0.0, rho), CMatrix::Identity(n, n)));
    }
  }
  const PropagationParams s = propagation_params_at(scalar_cable(0.3, 5e-7, 1e-6, 1e-10), 2e7);
  const CMatrix h = ctf_line(s, 80.0, CMatrix::Zero(1, 1));
  worst = std::max(worst, std::abs(h(0, 0) - std::exp(-s.gamma(0) * 80.0)) / std::abs(h(0, 0)));
  return {worst <= 1e-9, fmt::format("max rel error {:.1e}", worst)};
}

Outcome tanh_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.01, 1.0), l(2e-7, 1e-6), g(1e-7, 1e-4), c(3e-11, 2e-10),
      len(1.0, 300.0), zr(5.0, 500.0), zi(-200.0, 200.0);
  const FrequencyGrid grid = FrequencyGrid::plc_default();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const double rv = r(rng), lv = l(rng), gv = g(rng), cv = c(rng), length = len(rng);
    const Complex z_load(zr(rng), zi(rng));
    const auto params = line_propagation_params(scalar_cable(rv, lv, gv, cv), grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& p = params[k];
      const CMatrix rho = load_reflection(CMatrix::Constant(1, 1, 1.0 / z_load), p.yc);
      const Complex y = input_admittance_line(p, length, rho)(0, 0);
      const Complex ref = 1.0 / oracle::tanh_input_impedance(oracle::scalar_line(rv, lv, gv, cv, grid.frequency(k)),
                                                             z_load, length);
      worst = std::max(worst, std::abs(y - ref) / std::abs(ref));
    }
  }
  return {worst <= 1e-9, fmt::format("20 lines x {} frequencies, max rel error {:.1e}", grid.size(), worst)};
}

Outcome two_section() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> len(5.0, 150.0), scale(0.6, 1.6), g(0.002, 0.05), cap(1e-10, 5e-9);
  const FrequencyGrid grid(1e5, 1e5, 400);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    CoupledCableModel m1, m2;
    m1.conductors = m2.conductors = n;
    m2.l *= scale(rng);
    m2.c *= scale(rng);
    m2.r0 *= scale(rng);
    const CableSpec c1("c1", m1), c2("c2", m2);
    const double l1 = len(rng), l2 = len(rng);
    std::vector<double> rs(static_cast<std::size_t>(n)), cs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      rs[static_cast<std::size_t>(i)] = 1.0 / g(rng);
      cs[static_cast<std::size_t>(i)] = cap(rng);
    }
    const AdmittanceModel y_load({ParallelRC{rs, cs}});
    const AdmittanceModel y_source = AdmittanceModel::conductance(g(rng), n);
    const TwoSectionResult closed = two_section_oracle(c1, l1, c2, l2, y_load, y_source, grid);

    NetworkTopology net;
    net.cables.emplace("c1", c1);
    net.cables.emplace("c2", c2);
    net.nodes = {"s", "m", "e"};
    net.branches = {{"first", "s", "m", "c1", l1}, {"second", "m", "e", "c2", l2}};
    net.loads.emplace("e", y_load);
    net.ports.emplace("p", Port{"s", y_source});
    const NetworkSolver solver(net, grid);
    const PortReduction red = solver.reduce_to_port("p");
    worst = std::max(worst, max_relative_difference(closed.y_in, red.y_in));
    worst = std::max(worst, max_relative_difference(closed.rho_in, solver.input_reflection("p", red)));
  }
  return {worst <= 1e-9, fmt::format("20 cases, max rel error {:.1e}", worst)};
}

Outcome series_convergence() {
  constexpr double kRoundoffFloor = 1e-10;
  std::mt19937_64 rng(5);
  bool monotone = true;
  double worst_final = 0.0, worst_radius = 0.0;
  for (int n : {1, 2, 3}) {
    const CableSpec cable = CableSpec::default_cable(n);
    for (double f : {2e6, 20e6, 60e6}) {
      const PropagationParams p = propagation_params_at(cable, f);
      const CMatrix rho_m = modal_transform(load_reflection(random_load(rng, n), p.yc), p, ModalDirection::to_modal);
      const CMatrix y_r = p.yc.real().cast<Complex>();
      const CMatrix y_exact = input_admittance_line(p, 30.0, rho_m);
      const CMatrix rho_exact = line_input_reflection(p, 30.0, rho_m, y_r, ReflectionRoute::modal);
      double prev_y = 1e300, prev_rho = 1e300;
      for (int terms = 1; terms <= 50; ++terms) {
        const SeriesApproximation s = series_truncated_responses(p, 30.0, rho_m, y_r, terms);
        worst_radius = std::max(worst_radius, s.spectral_radius);
        const double ey = relative_difference(s.y_in, y_exact);
        const double er = relative_difference(s.rho_in, rho_exact);
        monotone = monotone && (ey <= prev_y || ey <= kRoundoffFloor) && (er <= prev_rho || er <= kRoundoffFloor);
        prev_y = ey;
        prev_rho = er;
      }
      worst_final = std::max({worst_final, prev_y, prev_rho});
    }
  }
  return {monotone && worst_final <= 1e-6 && worst_radius < 0.9,
          fmt::format("monotone {}, error at n=50 {:.1e}, radius {:.2f}", monotone, worst_final, worst_radius)};
}

NetworkTopology one_line(double length, const AdmittanceModel& load) {
  NetworkTopology net;
  const CableSpec cable = CableSpec::default_cable(1);
  net.cables.emplace(cable.label(), cable);
  net.nodes = {"s", "e"};
  net.branches = {{"line", "s", "e", cable.label(), length}};
  net.loads.emplace("e", load);
  net.ports.emplace("p", Port{"s", AdmittanceModel::conductance(0.01, 1)});
  return net;
}

Outcome tdr_geometry() {
  const FrequencyGrid grid = FrequencyGrid::plc_default();
  double worst = 0.0;
  for (double length : {40.0, 100.0, 170.0, 260.0}) {
    const NetworkTopology net = one_line(length, AdmittanceModel::conductance(1.0 / 330.0, 1));
    const TimeTrace t = to_time_domain(NetworkSolver(net, grid).reduce_to_port("p").y_in);
    const auto peaks = detect_peaks(t).aggregated(3);
    if (peaks.empty()) return {false, fmt::format("no peak for {} m", length)};
    worst = std::max(worst, std::abs(static_cast<double>(peaks.front().sample) -
                                     2.0 * length / fastest(net, grid) / t.t_step));
  }
  NetworkTopology open = one_line(100.0, AdmittanceModel{});
  open.ports.at("p").source = AdmittanceModel::conductance(0.002, 1);
  const TimeTrace t = to_time_domain(NetworkSolver(open, grid).input_reflection("p"));
  const auto peaks = detect_peaks(t, {0.02, 3}).aggregated(3);
  if (peaks.size() < 3) return {false, "open-line echo train has fewer than 3 peaks"};
  const double t1 = 100.0 / fastest(open, grid) / t.t_step;
  double worst_train = 0.0;
  for (int n = 1; n <= 3; ++n) {
    worst_train = std::max(worst_train,
                           std::abs(static_cast<double>(peaks[static_cast<std::size_t>(n - 1)].sample) - 2.0 * n * t1));
  }
  return {worst <= 1.0 && worst_train <= 1.0,
          fmt::format("first echo off by {:.2f} samples, echo train off by {:.2f} samples", worst, worst_train)};
}

// Random tree with ports on the two most distant leaves and different terminations at each end.
NetworkTopology two_leaf_network(const EnsembleConfig& cfg, std::size_t index) {
  NetworkTopology net = generate_random_network(cfg, index);
  const auto ls = leaves(net);
  const std::string a = farthest(net, ls.front(), ls);
  const std::string b = farthest(net, a, ls);
  const int n = net.conductors();
  net.ports.clear();
  net.ports.emplace("A", Port{a, AdmittanceModel::conductance(0.004, n)});
  net.ports.emplace("B", Port{b, AdmittanceModel::conductance(0.002, n)});
  net.loads[a] = AdmittanceModel::conductance(0.05, n);
  net.loads[b] = AdmittanceModel::conductance(0.0008, n);
  return net;
}

Outcome peak_spacing_symmetry() {
  EnsembleConfig cfg;
  cfg.min_nodes = 5;
  cfg.max_nodes = 8;
  cfg.seed = 7;
  std::size_t symmetric = 0, amplitudes_differ = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < 20; ++i) {
    const NetworkTopology net = two_leaf_network(cfg, i);
    const NetworkSolver solver(net, cfg.grid);
    const TimeTrace ab =
        to_time_domain(solver.end_to_end_ctf("A", net.port("B").node, CtfReference::source_emf).h_total);
    const TimeTrace ba =
        to_time_domain(solver.end_to_end_ctf("B", net.port("A").node, CtfReference::source_emf).h_total);
    const SymmetryResult r = check_peak_spacing_symmetry(ab, ba, 1.0);
    if (r.symmetric()) {
      ++symmetric;
    } else {
      first_failure += fmt::format("; network {}: {}", i, r.report);
    }
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < ab.size(); ++k) {
      diff = std::max(diff, (ab.samples[k] - ba.samples[k]).cwiseAbs().maxCoeff());
      scale = std::max(scale, ab.samples[k].cwiseAbs().maxCoeff());
    }
    if (diff > 0.01 * scale) ++amplitudes_differ;
  }
  return {symmetric == 20 && amplitudes_differ == 20,
          fmt::format("symmetric spacings {}/20, differing amplitudes {}/20{}", symmetric, amplitudes_differ,
                      first_failure)};
}

Outcome reciprocity() {
  EnsembleConfig cfg;
  cfg.min_nodes = 5;
  cfg.max_nodes = 8;
  cfg.grid = FrequencyGrid(1e5, 2e5, 400);
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    NetworkTopology net = two_leaf_network(cfg, i);
    const int n = net.conductors();
    const AdmittanceModel y = AdmittanceModel::conductance(0.0125, n);
    for (const auto& port : {"A", "B"}) {
      net.ports.at(port).source = y;
      net.loads[net.port(port).node] = y;
    }
    const NetworkSolver solver(net, cfg.grid);
    const MatrixSpectrum ab = solver.end_to_end_ctf("A", net.port("B").node, CtfReference::source_emf).h_total;
    const MatrixSpectrum ba = solver.end_to_end_ctf("B", net.port("A").node, CtfReference::source_emf).h_total;
    for (std::size_t k = 0; k < ab.size(); ++k) worst = std::max(worst, relative_difference(ab[k], ba[k].transpose()));
  }
  return {worst <= 1e-9, fmt::format("10 trees, max rel |H_AB - H_BA^T| {:.1e}", worst)};
}

Outcome anomaly_identities() {
  EnsembleConfig cfg;
  cfg.grid = FrequencyGrid(1e5, 1e5, 300);
  double worst = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const int n = net.conductors();
    const Branch& b = net.branches.front();
    const std::string leaf = net.port(kTransmitterPort).node;
    const std::vector<Anomaly> anomalies = {
        LumpedFault{b.id, 0.4 * b.length, AdmittanceModel::conductance(0.0, n), false},
        LoadChange{leaf, net.loads.at(leaf)},
        DistributedFault{b.id, 0.2 * b.length, 0.5 * b.length, net.cables.at(b.cable)},
    };
    const NetworkSolver base(net, cfg.grid);
    const PortReduction red = base.reduce_to_port(kReceiverPort);
    const MatrixSpectrum y = red.y_in;
    const MatrixSpectrum rho = base.input_reflection(kReceiverPort, red);
    const MatrixSpectrum h = base.end_to_end_ctf(kTransmitterPort, "n0", CtfReference::source_emf).h_total;
    for (const Anomaly& a : anomalies) {
      const NetworkSolver s(apply_anomaly(net, a, cfg.grid), cfg.grid);
      const PortReduction red_a = s.reduce_to_port(kReceiverPort);
      const std::vector<std::pair<MatrixSpectrum, const MatrixSpectrum*>> pairs = {
          {red_a.y_in, &y},
          {s.input_reflection(kReceiverPort, red_a), &rho},
          {s.end_to_end_ctf(kTransmitterPort, "n0", CtfReference::source_emf).h_total, &h}};
      for (const auto& [pert, ref] : pairs) {
        const DeltaSpectrum ch = delta_chain(pert, *ref);
        const DeltaSpectrum sup = delta_superposition(pert, *ref, false);
        const DeltaSpectrum norm = delta_superposition(pert, *ref, true);
        for (std::size_t k = 0; k < ref->size(); ++k) {
          const CMatrix id = CMatrix::Identity(n, n);
          worst = std::max(worst, (ch.values[k] - id).norm());
          worst = std::max(worst, sup.values[k].norm() / (*ref)[k].norm());
          worst = std::max(worst, (norm.values[k] - (ch.values[k] - id)).norm());
        }
      }
    }
  }
  return {worst <= 1e-12, fmt::format("15 anomalies x 3 quantities, max deviation {:.1e}", worst)};
}

double worst_early_energy(const FrequencyGrid& grid) {
  EnsembleConfig cfg;
  cfg.seed = 11;
  constexpr std::size_t kGuard = 4;
  double worst = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const NetworkTopology net = generate_random_network(cfg, i);
    const LumpedFault fault = random_lumped_fault(cfg, net, i);
    const MatrixSpectrum y = reduce_to_port(net, kReceiverPort, grid).y_in;
    const MatrixSpectrum y_a = reduce_to_port(apply_anomaly(net, fault, grid), kReceiverPort, grid).y_in;
    const TimeTrace t = to_time_domain(delta_superposition(y_a, y, false).values);
    const double t_anomaly = anomaly_distance(net, fault, net.port(kReceiverPort).node) / fastest(net, grid);
    const auto arrival = static_cast<std::size_t>(std::floor(2.0 * t_anomaly / t.t_step));
    const std::size_t end = arrival > kGuard ? arrival - kGuard : 0;
    worst = std::max(worst, t.energy(0, end) / t.energy());
  }
  return worst;
}

Outcome pre_anomaly_cancellation() {
  // Same band as the default grid with a 4x finer step, so the 40 us trace holds the slow
  // load tails instead of wrapping them onto the early samples.
  const double fine = worst_early_energy(FrequencyGrid(25e3, 25e3, 3200));
  const double coarse = worst_early_energy(FrequencyGrid::plc_default());
  return {fine <= 0.01, fmt::format("10 networks, worst early energy fraction {:.2e} (25 kHz step), {:.2e} "
                                    "on the 100 kHz default grid",
                                    fine, coarse)};
}

Outcome signatures() {
  const NetworkTopology net = single_line_network();
  const auto outcomes = run_scenario_suite(net, "in", single_line_scenarios(), FrequencyGrid::plc_default());
  std::size_t ok = 0;
  std::string classes;
  for (const auto& o : outcomes) {
    if (o.rule_satisfied) ++ok;
    std::string got;
    for (PeakChange c : o.diff.classes) got += (got.empty() ? "" : "+") + std::string(to_string(c));
    classes += fmt::format("; {}: {}", o.name, got);
  }
  return {ok == outcomes.size() && !outcomes.empty(), fmt::format("{}/{} classified{}", ok, outcomes.size(), classes)};
}

Outcome distance_trends() {
  const EnsembleConfig cfg;
  const SweepResult r = run_distance_sweep(cfg);
  const bool u = ctf_u_shape(r);
  std::string means;
  for (const auto& b : r.position_bins) means += fmt::format("{}{:.3f}", means.empty() ? "" : " ", b.ctf.mean);
  return {r.spearman_admittance <= -0.5 && r.spread_reflection > r.spread_admittance && u,
          fmt::format("{} networks, spearman {:.3f}, spread rho {:.3f} vs Y {:.3f}, CTF position means [{}]",
                      r.records.size(), r.spearman_admittance, r.spread_reflection, r.spread_admittance, means)};
}

Outcome backbone_lateral() {
  EnsembleConfig cfg;
  cfg.n_networks = 50;
  const BackboneLateralResult r = run_backbone_lateral(cfg);
  const double bb = r.mean_backbone_db(), lat = r.mean_lateral_db();
  return {!r.backbone_db.empty() && bb < 0.0 && std::abs(lat) <= 0.5,
          fmt::format("{} networks, backbone {:.2f} dB, lateral {:+.3f} dB", r.backbone_db.size(), bb, lat)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    files[e.path().filename().string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Outcome cli_determinism() {
  const fs::path examples = MTLNET_EXAMPLES_DIR;
  const std::vector<std::vector<std::string>> invocations = {
      {"simulate", (examples / "two_node.json").string(), "--port", "pa", "--rx", "b"},
      {"tdr", (examples / "single_line.json").string(), "--port", "tdr"},
      {"locate", (examples / "two_node.json").string(), "--port", "pa", "--anomaly",
       (examples / "tee_fault.json").string()},
      {"sweep", "--networks", "6", "--seed", "42"},
      {"scenarios"},
  };
  std::size_t identical = 0, files = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    std::array<std::map<std::string, std::string>, 2> out;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = fs::temp_directory_path() / fmt::format("mtlnet_determinism_{}_{}", i, rep);
      fs::remove_all(dir);
      std::vector<std::string> args = invocations[i];
      args.insert(args.end(), {"--out", dir.string(), "--no-timestamp"});
      std::ostringstream sink;
      if (cli::run_command(args, sink, sink) != 0) return {false, invocations[i].front() + " failed: " + sink.str()};
      out[static_cast<std::size_t>(rep)] = snapshot(dir);
    }
    files += out[0].size();
    if (out[0] == out[1] && !out[0].empty()) ++identical;
  }
  return {identical == invocations.size(),
          fmt::format("{}/{} commands byte-identical over {} files", identical, invocations.size(), files)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> only, allowed_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--allow-red" && i + 1 < argc) {
      allowed_red.emplace_back(argv[++i]);
    } else {
      only.push_back(arg);
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"reflection-extremes", reflection_extremes},
      {"line-identities", line_identities},
      {"tanh-oracle", tanh_oracle},
      {"two-section-oracle", two_section},
      {"series-convergence", series_convergence},
      {"tdr-geometry", tdr_geometry},
      {"peak-spacing-symmetry", peak_spacing_symmetry},
      {"reciprocity", reciprocity},
      {"anomaly-identities", anomaly_identities},
      {"pre-anomaly-cancellation", pre_anomaly_cancellation},
      {"signature-classification", signatures},
      {"distance-trends", distance_trends},
      {"backbone-vs-lateral", backbone_lateral},
      {"cli-determinism", cli_determinism},
  };
  int failures = 0, unexpected = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, check] = criteria[i];
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ++run;
    if (!o.pass) {
      ++failures;
      if (std::find(allowed_red.begin(), allowed_red.end(), name) == allowed_red.end()) ++unexpected;
    }
    std::cout << fmt::format("{:>2} {} {:<26} {} ({:.1f} s)", i + 1, o.pass ? "PASS" : "FAIL", name, o.detail, seconds)
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", run - static_cast<std::size_t>(failures), run) << std::endl;
  if (failures > unexpected) std::cout << fmt::format("{} known red criterion(s) tolerated", failures - unexpected) << std::endl;
  return unexpected == 0 ? 0 : 1;
}
