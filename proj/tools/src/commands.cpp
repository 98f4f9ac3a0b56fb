#include "commands.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mtlnet/experiments.hpp"
#include "output.hpp"
#include "topology_io.hpp"

namespace mtlnet::cli {

namespace {

struct CommonOptions {
  std::string grid = "100e3,100e3,800";
  std::string window = "hann";
  double threshold = 0.05;
  std::size_t min_separation = 3;
  std::uint64_t seed = 1;
  std::string out = ".";
  bool no_timestamp = false;

  FrequencyGrid frequency_grid() const {
    std::vector<std::string> parts;
    std::stringstream ss(grid);
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("--grid expects f_start,f_step,n");
    try {
      return FrequencyGrid(std::stod(parts[0]), std::stod(parts[1]), std::stoul(parts[2]));
    } catch (const std::logic_error&) {
      throw ValidationError("--grid: cannot parse '" + grid + "'");
    }
  }
  Window window_kind() const { return window == "rect" ? Window::rect : Window::hann; }
  PeakOptions peak_options() const { return {threshold, min_separation}; }
  OutputWriter writer() const { return OutputWriter(out, !no_timestamp); }
};

struct Inputs {
  std::string topology;
  std::string port;
  std::string rx;
  std::string to;
  std::string anomaly;
  std::string perturbed;
  std::string quantity = "admittance";
  std::string model = "superposition";
  std::string reference = "source";
  std::string output = "perturbed.json";
  double velocity = 0.0;
  bool both = false;
  std::size_t networks = 200;
  std::vector<std::size_t> nodes{4, 12};
  std::vector<double> lengths{10.0, 100.0};
  std::size_t bins = 8;
  double length = 150.0;
  int conductors = 2;
};

CtfReference reference_of(const Inputs& in) {
  return in.reference == "node" ? CtfReference::node_voltage : CtfReference::source_emf;
}

Anomaly read_anomaly(const std::string& spec, const NetworkTopology& net, const CableLibrary& lib) {
  const json j = (!spec.empty() && spec.front() == '{') ? [&] {
    try {
      return json::parse(spec);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("--anomaly: ") + e.what());
    }
  }()
                                                           : read_json_file(spec);
  return anomaly_from_json(j, net, lib);
}

/// Fastest lossless modal velocity of the cable attached to `node`.
double default_velocity(const NetworkTopology& net, const std::string& node, const FrequencyGrid& grid) {
  const auto incident = net.incident_branches(node);
  if (incident.empty()) throw ValidationError("node '" + node + "' has no branch");
  const Branch* b = net.find_branch(incident.front());
  return modal_velocities(net.cables.at(b->cable), grid.frequency(grid.size() / 2)).front();
}

MatrixSpectrum port_quantity(const NetworkSolver& solver, const std::string& quantity, const std::string& port,
                             const std::string& rx, CtfReference reference) {
  if (quantity == "admittance") return solver.reduce_to_port(port).y_in;
  if (quantity == "reflection") return solver.input_reflection(port);
  if (rx.empty()) throw ValidationError("--quantity ctf requires --rx");
  return solver.end_to_end_ctf(port, rx, reference).h_total;
}

std::string file_tag(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'); }, '_');
  return s;
}

int cmd_validate(const Inputs& in, const CommonOptions&, std::ostream& out) {
  const NetworkTopology net = read_topology(in.topology, load_cable_library());
  const ValidationReport report = validate_topology(net);
  if (report.valid()) {
    fmt::print(out, "valid\n");
    return kExitOk;
  }
  fmt::print(out, "invalid\n");
  for (const auto& v : report.violations) fmt::print(out, "  {}\n", v);
  return kExitValidation;
}

int cmd_simulate(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const NetworkTopology net = read_topology(in.topology, load_cable_library());
  const NetworkSolver solver(net, opt.frequency_grid());
  OutputWriter w = opt.writer();
  const PortReduction red = solver.reduce_to_port(in.port);
  w.spectrum("y_in_" + file_tag(in.port) + ".csv", red.y_in);
  w.spectrum("rho_in_" + file_tag(in.port) + ".csv", solver.input_reflection(in.port, red));
  if (!in.rx.empty()) {
    w.spectrum("h_total_" + file_tag(in.port) + "_" + file_tag(in.rx) + ".csv",
               solver.end_to_end_ctf(in.port, in.rx, reference_of(in)).h_total);
  }
  for (const auto& p : w.written()) fmt::print(out, "wrote {}\n", p.string());
  return kExitOk;
}

int cmd_tdr(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const NetworkTopology net = read_topology(in.topology, load_cable_library());
  const FrequencyGrid grid = opt.frequency_grid();
  const NetworkSolver solver(net, grid);
  const MatrixSpectrum s = port_quantity(solver, in.quantity, in.port, "", reference_of(in));
  const TimeTrace trace = to_time_domain(s, opt.window_kind(), in.quantity);
  const PeakList peaks = detect_peaks(trace, opt.peak_options());
  const double v = in.velocity > 0.0 ? in.velocity : default_velocity(net, net.port(in.port).node, grid);
  OutputWriter w = opt.writer();
  w.trace("tdr_" + in.quantity + "_" + file_tag(in.port) + ".csv", trace);
  w.peaks("peaks_" + file_tag(in.port) + ".csv", peaks, v, DistanceMode::reflectometric);
  for (const auto& p : peaks.aggregated(opt.min_separation)) {
    fmt::print(out, "peak t={:.6g} s d={:.6g} m amplitude={:.6g}\n", p.time,
               time_to_distance(p.time, v, DistanceMode::reflectometric), p.amplitude);
  }
  return kExitOk;
}

int cmd_ctf(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const NetworkTopology net = read_topology(in.topology, load_cable_library());
  const FrequencyGrid grid = opt.frequency_grid();
  const NetworkSolver solver(net, grid);
  const double v = in.velocity > 0.0 ? in.velocity : default_velocity(net, net.port(in.port).node, grid);
  OutputWriter w = opt.writer();

  auto direction = [&](const std::string& from, const std::string& to) {
    const MatrixSpectrum h = solver.end_to_end_ctf(from, net.port(to).node, reference_of(in)).h_total;
    TimeTrace trace = to_time_domain(h, opt.window_kind(), from + "->" + to);
    const std::string tag = file_tag(from) + "_" + file_tag(to);
    w.spectrum("ctf_" + tag + ".csv", h);
    w.trace("ctf_trace_" + tag + ".csv", trace);
    w.peaks("ctf_peaks_" + tag + ".csv", detect_peaks(trace, opt.peak_options()), v, DistanceMode::end_to_end);
    return trace;
  };
  const TimeTrace ab = direction(in.port, in.to);
  if (in.both) {
    const TimeTrace ba = direction(in.to, in.port);
    const SymmetryResult sym = check_peak_spacing_symmetry(ab, ba, 1.0, opt.peak_options());
    const std::string verdict = sym.verdict == SymmetryResult::Verdict::symmetric    ? "symmetric"
                                : sym.verdict == SymmetryResult::Verdict::asymmetric ? "asymmetric"
                                                                                     : "inconclusive";
    w.json_file("symmetry.json", json{{"verdict", verdict},
                                      {"spacings_ab_s", sym.spacings_ab},
                                      {"spacings_ba_s", sym.spacings_ba},
                                      {"report", sym.report}});
    fmt::print(out, "peak spacing symmetry: {}\n{}\n", verdict, sym.report);
  }
  for (const auto& p : w.written()) fmt::print(out, "wrote {}\n", p.string());
  return kExitOk;
}

int cmd_inject(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const CableLibrary lib = load_cable_library();
  const NetworkTopology net = read_topology(in.topology, lib);
  const Anomaly a = read_anomaly(in.anomaly, net, lib);
  const NetworkTopology perturbed = apply_anomaly(net, a, opt.frequency_grid());
  OutputWriter w = opt.writer();
  w.json_file(in.output, topology_to_json(perturbed));
  fmt::print(out, "{} -> {}\n", describe(a), w.written().front().string());
  return kExitOk;
}

int cmd_delta(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const CableLibrary lib = load_cable_library();
  const NetworkTopology net = read_topology(in.topology, lib);
  const FrequencyGrid grid = opt.frequency_grid();
  const NetworkTopology perturbed =
      in.perturbed.empty() ? apply_anomaly(net, read_anomaly(in.anomaly, net, lib), grid) : read_topology(in.perturbed, lib);
  const MatrixSpectrum x = port_quantity(NetworkSolver(net, grid), in.quantity, in.port, in.rx, reference_of(in));
  const MatrixSpectrum x_a = port_quantity(NetworkSolver(perturbed, grid), in.quantity, in.port, in.rx, reference_of(in));
  const DeltaSpectrum d = in.model == "chain"           ? delta_chain(x_a, x)
                          : in.model == "superposition" ? delta_superposition(x_a, x, false)
                                                        : delta_superposition(x_a, x, true);
  const std::string tag = std::string(to_string(d.model)) + "_" + in.quantity;
  OutputWriter w = opt.writer();
  w.spectrum("delta_" + tag + ".csv", d.values);
  w.trace("delta_" + tag + "_trace.csv", to_time_domain(d.values, opt.window_kind(), tag));
  fmt::print(out, "max |delta| = {:.6g}\n", max_abs_entry(d.values));
  if (in.model == "chain" && in.quantity == "reflection") {
    fmt::print(out, "warning: chain deltas of reflection coefficients are unreliable where rho_in is close to 0\n");
  }
  return kExitOk;
}

int cmd_locate(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const CableLibrary lib = load_cable_library();
  const NetworkTopology net = read_topology(in.topology, lib);
  const FrequencyGrid grid = opt.frequency_grid();
  const NetworkTopology perturbed =
      in.perturbed.empty() ? apply_anomaly(net, read_anomaly(in.anomaly, net, lib), grid) : read_topology(in.perturbed, lib);
  const MatrixSpectrum y = NetworkSolver(net, grid).reduce_to_port(in.port).y_in;
  const MatrixSpectrum y_a = NetworkSolver(perturbed, grid).reduce_to_port(in.port).y_in;
  const TimeTrace trace = to_time_domain(delta_superposition(y_a, y, false).values, opt.window_kind(), "delta");
  const double v = in.velocity > 0.0 ? in.velocity : default_velocity(net, net.port(in.port).node, grid);
  const LocateResult r = locate_anomaly_reflectometric(trace, v, opt.peak_options());
  OutputWriter w = opt.writer();
  w.trace("locate_trace_" + file_tag(in.port) + ".csv", trace);
  w.json_file("locate.json", json{{"found", r.found},
                                  {"distance_m", r.distance},
                                  {"time_s", r.time},
                                  {"confidence", r.confidence},
                                  {"velocity_m_per_s", v}});
  if (!r.found) {
    fmt::print(out, "no anomaly peak above threshold\n");
    return kExitOk;
  }
  fmt::print(out, "anomaly at {:.6g} m (t = {:.6g} s, confidence {:.3f})\n", r.distance, r.time, r.confidence);
  return kExitOk;
}

int cmd_sweep(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  EnsembleConfig cfg;
  cfg.n_networks = in.networks;
  cfg.min_nodes = in.nodes.at(0);
  cfg.max_nodes = in.nodes.at(1);
  cfg.min_length = in.lengths.at(0);
  cfg.max_length = in.lengths.at(1);
  cfg.seed = opt.seed;
  cfg.grid = opt.frequency_grid();
  cfg.n_bins = in.bins;
  const SweepResult r = run_distance_sweep(cfg);

  OutputWriter w = opt.writer();
  std::string records = "network,anomaly,distance_m,path_fraction,delta_admittance,delta_reflection,delta_ctf\n";
  for (const auto& rec : r.records) {
    records += fmt::format("{},\"{}\",{},{},{},{},{}\n", rec.network, rec.anomaly, rec.distance, rec.path_fraction,
                           rec.delta_admittance, rec.delta_reflection, rec.delta_ctf);
  }
  w.text("sweep_records.csv", records);
  std::string bins = "axis,lower,upper,count,quantity,mean,median,q1,q3\n";
  auto add_bins = [&](const char* axis, const std::vector<BinStatistics>& list) {
    for (const auto& b : list) {
      const std::pair<const char*, const BinStatistics::Stats*> stats[] = {
          {"admittance", &b.admittance}, {"reflection", &b.reflection}, {"ctf", &b.ctf}};
      for (const auto& [name, s] : stats) {
        bins += fmt::format("{},{},{},{},{},{},{},{},{}\n", axis, b.lower, b.upper, b.count, name, s->mean, s->median,
                            s->q1, s->q3);
      }
    }
  };
  add_bins("distance_m", r.bins);
  add_bins("path_fraction", r.position_bins);
  w.text("sweep_bins.csv", bins);
  w.json_file("sweep_summary.json", json{{"networks", cfg.n_networks},
                                         {"records", r.records.size()},
                                         {"skipped", r.skipped},
                                         {"seed", cfg.seed},
                                         {"spearman_admittance", r.spearman_admittance},
                                         {"spread_admittance", r.spread_admittance},
                                         {"spread_reflection", r.spread_reflection},
                                         {"ctf_u_shape", ctf_u_shape(r)}});
  fmt::print(out, "{} records, {} skipped, spearman(Y) = {:.3f}, spread Y = {:.3f}, spread rho = {:.3f}\n",
             r.records.size(), r.skipped, r.spearman_admittance, r.spread_admittance, r.spread_reflection);
  return kExitOk;
}

int cmd_scenarios(const Inputs& in, const CommonOptions& opt, std::ostream& out) {
  const NetworkTopology net = single_line_network(in.conductors, in.length);
  PeakDiffOptions diff_opts;
  diff_opts.peaks = opt.peak_options();
  const auto outcomes =
      run_scenario_suite(net, "in", single_line_scenarios(in.conductors, in.length), opt.frequency_grid(), diff_opts);
  OutputWriter w = opt.writer();
  w.json_file("baseline_topology.json", topology_to_json(net));
  json summary = json::array();
  bool all_ok = true;
  for (const auto& o : outcomes) {
    w.trace("scenario_" + file_tag(o.name) + "_baseline.csv", o.baseline_trace);
    w.trace("scenario_" + file_tag(o.name) + "_perturbed.csv", o.perturbed_trace);
    w.trace("scenario_" + file_tag(o.name) + "_superposition.csv", o.superposition_trace);
    json observed = json::array(), expected = json::array();
    for (auto c : o.diff.classes) observed.push_back(std::string(to_string(c)));
    for (auto c : o.expected) expected.push_back(std::string(to_string(c)));
    summary.push_back({{"name", o.name},
                       {"anomaly", o.anomaly},
                       {"observed", observed},
                       {"expected", expected},
                       {"new_peaks", o.diff.new_peaks.size()},
                       {"shifted_peaks", o.diff.shifted.size()},
                       {"vanished_peaks", o.diff.vanished.size()},
                       {"amplitude_changes", o.diff.amplitude_changes},
                       {"rule_satisfied", o.rule_satisfied},
                       {"note", o.note}});
    fmt::print(out, "{:<18} {}  {}\n", o.name, o.rule_satisfied ? "ok" : "MISMATCH", observed.dump());
    all_ok = all_ok && o.rule_satisfied;
  }
  w.json_file("scenarios.json", json{{"scenarios", summary}});
  return all_ok ? kExitOk : kExitValidation;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiconductor power line network simulator", "mtlnet"};
  app.require_subcommand(1);
  CommonOptions opt;
  Inputs in;

  app.add_option("--grid", opt.grid, "Frequency grid f_start,f_step,n (Hz)")->capture_default_str();
  app.add_option("--window", opt.window, "Time-domain window")->check(CLI::IsMember({"hann", "rect"}))->capture_default_str();
  app.add_option("--threshold", opt.threshold, "Peak threshold relative to the trace maximum")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--min-separation", opt.min_separation, "Minimum peak separation (samples)")->capture_default_str();
  app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_flag("--no-timestamp", opt.no_timestamp, "Omit the timestamp header from outputs");

  auto topology = [&](CLI::App* sub) { sub->add_option("topology", in.topology, "Topology file")->required(); };
  auto port = [&](CLI::App* sub) { sub->add_option("--port", in.port, "Port name")->required(); };
  auto anomaly = [&](CLI::App* sub) {
    auto* a = sub->add_option("--anomaly", in.anomaly, "Anomaly file or inline JSON");
    auto* p = sub->add_option("--perturbed", in.perturbed, "Perturbed topology file");
    a->excludes(p);
  };
  const std::vector<std::string> quantities{"admittance", "reflection", "ctf"};
  const std::vector<std::string> references{"source", "node"};

  auto* validate = app.add_subcommand("validate", "Check a topology file");
  topology(validate);

  auto* simulate = app.add_subcommand("simulate", "Input admittance, reflection and CTF spectra");
  topology(simulate);
  port(simulate);
  simulate->add_option("--rx", in.rx, "Receiver node for the end-to-end CTF");
  simulate->add_option("--reference", in.reference, "CTF reference")->check(CLI::IsMember(references));

  auto* tdr = app.add_subcommand("tdr", "Reflectometric time trace and peaks");
  topology(tdr);
  port(tdr);
  tdr->add_option("--quantity", in.quantity, "admittance or reflection")->check(CLI::IsMember({"admittance", "reflection"}));
  tdr->add_option("--velocity", in.velocity, "Propagation velocity (m/s)");

  auto* ctf = app.add_subcommand("ctf", "End-to-end transfer function and trace");
  topology(ctf);
  port(ctf);
  ctf->add_option("--to", in.to, "Receiving port")->required();
  ctf->add_flag("--both", in.both, "Also compute the reverse direction and compare peak spacings");
  ctf->add_option("--reference", in.reference, "CTF reference")->check(CLI::IsMember(references));
  ctf->add_option("--velocity", in.velocity, "Propagation velocity (m/s)");

  auto* inject = app.add_subcommand("inject", "Write the topology with an anomaly applied");
  topology(inject);
  inject->add_option("--anomaly", in.anomaly, "Anomaly file or inline JSON")->required();
  inject->add_option("--output", in.output, "Output file name")->capture_default_str();

  auto* delta = app.add_subcommand("delta", "Chain or superposition delta of a network quantity");
  topology(delta);
  port(delta);
  anomaly(delta);
  delta->add_option("--model", in.model, "Delta model")->check(CLI::IsMember({"chain", "superposition", "normalized"}));
  delta->add_option("--quantity", in.quantity, "Quantity")->check(CLI::IsMember(quantities));
  delta->add_option("--rx", in.rx, "Receiver node for the CTF");
  delta->add_option("--reference", in.reference, "CTF reference")->check(CLI::IsMember(references));

  auto* locate = app.add_subcommand("locate", "Estimate the anomaly distance from a port");
  topology(locate);
  port(locate);
  anomaly(locate);
  locate->add_option("--velocity", in.velocity, "Propagation velocity (m/s)");

  auto* sweep = app.add_subcommand("sweep", "Random-network fault distance study");
  sweep->add_option("--networks", in.networks, "Number of networks")->check(CLI::PositiveNumber);
  sweep->add_option("--nodes", in.nodes, "Node count range min max")->expected(2);
  sweep->add_option("--lengths", in.lengths, "Branch length range min max (m)")->expected(2);
  sweep->add_option("--bins", in.bins, "Distance bins")->check(CLI::Range(3, 1000));

  auto* scenarios = app.add_subcommand("scenarios", "Single-line anomaly signature scenarios");
  scenarios->add_option("--length", in.length, "Line length (m)")->check(CLI::PositiveNumber);
  scenarios->add_option("--conductors", in.conductors, "Conductor count")->check(CLI::Range(1, 4));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto selected = app.get_subcommands();
    err << "error: " << e.what() << "\n";
    err << (selected.empty() ? app.help() : selected.front()->help());
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(in, opt, out);
    if (simulate->parsed()) return cmd_simulate(in, opt, out);
    if (tdr->parsed()) return cmd_tdr(in, opt, out);
    if (ctf->parsed()) return cmd_ctf(in, opt, out);
    if (inject->parsed()) return cmd_inject(in, opt, out);
    if (delta->parsed() || locate->parsed()) {
      if (in.anomaly.empty() && in.perturbed.empty()) {
        err << "error: --anomaly or --perturbed is required\n";
        return kExitUsage;
      }
      return delta->parsed() ? cmd_delta(in, opt, out) : cmd_locate(in, opt, out);
    }
    if (sweep->parsed()) return cmd_sweep(in, opt, out);
    if (scenarios->parsed()) return cmd_scenarios(in, opt, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what();
    if (e.frequency() > 0.0) err << " (f = " << e.frequency() << " Hz)";
    err << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace mtlnet::cli
