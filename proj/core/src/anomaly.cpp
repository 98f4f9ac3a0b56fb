#include "mtlnet/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

constexpr double kEndpointTolerance = 1e-9;

std::string unique_name(const std::string& base, auto&& taken) {
  if (!taken(base)) return base;
  for (int i = 1;; ++i) {
    const std::string candidate = base + "#" + std::to_string(i);
    if (!taken(candidate)) return candidate;
  }
}

std::string fresh_node(const NetworkTopology& net, const std::string& base) {
  return unique_name(base, [&](const std::string& n) { return net.has_node(n); });
}

std::string fresh_branch(const NetworkTopology& net, const std::string& base) {
  return unique_name(base, [&](const std::string& b) { return net.find_branch(b) != nullptr; });
}

std::string format_length(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

const Branch& require_branch(const NetworkTopology& net, const std::string& id) {
  const Branch* b = net.find_branch(id);
  if (!b) throw ValidationError("anomaly references unknown branch '" + id + "'");
  return *b;
}

void add_load(NetworkTopology& net, const std::string& node, const AdmittanceModel& y) {
  auto it = net.loads.find(node);
  if (it == net.loads.end()) {
    net.loads.emplace(node, y);
  } else {
    it->second = it->second + y;
  }
}

// Replaces branch `id` by consecutive sections with the given lengths and cables.
// Returns the intermediate node ids.
std::vector<std::string> split_branch(NetworkTopology& net, const std::string& id,
                                      const std::vector<std::pair<double, std::string>>& sections,
                                      const std::vector<std::string>& node_bases) {
  const auto it = std::find_if(net.branches.begin(), net.branches.end(), [&](const Branch& b) { return b.id == id; });
  const Branch original = *it;
  net.branches.erase(it);

  std::vector<std::string> inner;
  for (std::size_t i = 0; i + 1 < sections.size(); ++i) {
    inner.push_back(fresh_node(net, node_bases[i]));
    net.nodes.push_back(inner.back());
  }
  std::string from = original.node_a;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const std::string to = (i + 1 < sections.size()) ? inner[i] : original.node_b;
    Branch b{fresh_branch(net, original.id + "." + std::to_string(i)), from, to, sections[i].second,
             sections[i].first};
    net.branches.push_back(b);
    from = to;
  }
  return inner;
}

struct Applier {
  const NetworkTopology& base;
  const FrequencyGrid& grid;

  NetworkTopology operator()(const LumpedFault& a) const {
    NetworkTopology net = base;
    const Branch& b = require_branch(net, a.branch);
    if (!(a.offset >= -kEndpointTolerance) || !(a.offset <= b.length + kEndpointTolerance)) {
      throw RangeError("lumped fault offset " + format_length(a.offset) + " m outside branch '" + b.id + "' of " +
                       format_length(b.length) + " m");
    }
    const int n = net.conductors();
    if (a.admittance.conductors() != 0 && a.admittance.conductors() != n) {
      throw ValidationError("lumped fault admittance has the wrong conductor count");
    }
    if (!a.active && !is_passive(a.admittance, grid, n)) {
      throw ValidationError("lumped fault admittance is not passive (flag it as active to allow this)");
    }
    if (a.offset <= kEndpointTolerance) {
      add_load(net, b.node_a, a.admittance);
    } else if (a.offset >= b.length - kEndpointTolerance) {
      add_load(net, b.node_b, a.admittance);
    } else {
      const std::string cable = b.cable;
      const double length = b.length;
      const auto inner = split_branch(net, a.branch, {{a.offset, cable}, {length - a.offset, cable}},
                                      {a.branch + ".fault@" + format_length(a.offset)});
      add_load(net, inner.front(), a.admittance);
    }
    return net;
  }

  NetworkTopology operator()(const LoadChange& a) const {
    NetworkTopology net = base;
    if (!net.has_node(a.node)) throw ValidationError("load change on unknown node '" + a.node + "'");
    if (a.new_load.conductors() != 0 && a.new_load.conductors() != net.conductors()) {
      throw ValidationError("new load has the wrong conductor count");
    }
    net.loads[a.node] = a.new_load;
    return net;
  }

  NetworkTopology operator()(const DistributedFault& a) const {
    NetworkTopology net = base;
    const Branch& b = require_branch(net, a.branch);
    if (a.degraded.conductors() != net.conductors()) {
      throw ValidationError("degraded cable conductor count differs from the network");
    }
    if (!(a.extent > 0.0) || !(a.start >= -kEndpointTolerance) ||
        !(a.start + a.extent <= b.length + kEndpointTolerance)) {
      throw RangeError("distributed fault [" + format_length(a.start) + ", " + format_length(a.start + a.extent) +
                       "] m outside branch '" + b.id + "' of " + format_length(b.length) + " m");
    }
    const std::string healthy = b.cable;
    const std::string degraded = unique_name(a.branch + ".degraded", [&](const std::string& c) {
      return net.cables.count(c) != 0;
    });
    net.cables.emplace(degraded, a.degraded);

    std::vector<std::pair<double, std::string>> sections;
    std::vector<std::string> bases;
    const double end = std::min(a.start + a.extent, b.length);
    if (a.start > kEndpointTolerance) {
      sections.emplace_back(a.start, healthy);
      bases.push_back(a.branch + ".damage@" + format_length(a.start));
    }
    sections.emplace_back(end - std::max(a.start, 0.0), degraded);
    if (b.length - end > kEndpointTolerance) {
      sections.emplace_back(b.length - end, healthy);
      bases.push_back(a.branch + ".damage@" + format_length(end));
    }
    split_branch(net, a.branch, sections, bases);
    return net;
  }
};

}  // namespace

std::string describe(const Anomaly& anomaly) {
  struct Describer {
    std::string operator()(const LumpedFault& a) const {
      return "lumped_fault(" + a.branch + " @ " + format_length(a.offset) + " m)";
    }
    std::string operator()(const LoadChange& a) const { return "load_change(" + a.node + ")"; }
    std::string operator()(const DistributedFault& a) const {
      return "distributed_fault(" + a.branch + " @ " + format_length(a.start) + " m + " + format_length(a.extent) +
             " m)";
    }
  };
  return std::visit(Describer{}, anomaly);
}

NetworkTopology apply_anomaly(const NetworkTopology& net, const Anomaly& anomaly, const FrequencyGrid& check_grid) {
  NetworkTopology out = std::visit(Applier{net, check_grid}, anomaly);
  const ValidationReport report = validate_topology(out);
  if (!report.valid()) throw ValidationError("anomaly produced an invalid topology: " + report.violations.front());
  return out;
}

double anomaly_distance(const NetworkTopology& net, const Anomaly& anomaly, const std::string& node) {
  struct Locator {
    const NetworkTopology& net;
    const std::string& node;

    double along(const std::string& branch_id, double offset) const {
      const Branch& b = require_branch(net, branch_id);
      const double via_a = path_length(net, node, b.node_a) + offset;
      const double via_b = path_length(net, node, b.node_b) + (b.length - offset);
      return std::min(via_a, via_b);
    }
    double operator()(const LumpedFault& a) const { return along(a.branch, a.offset); }
    double operator()(const LoadChange& a) const { return path_length(net, node, a.node); }
    double operator()(const DistributedFault& a) const {
      return std::min(along(a.branch, a.start), along(a.branch, a.start + a.extent));
    }
  };
  return std::visit(Locator{net, node}, anomaly);
}

std::string_view to_string(DeltaModel model) {
  switch (model) {
    case DeltaModel::chain: return "chain";
    case DeltaModel::superposition: return "superposition";
    case DeltaModel::superposition_normalized: return "superposition_normalized";
  }
  return "unknown";
}

std::string_view to_string(DeltaQuantity quantity) {
  switch (quantity) {
    case DeltaQuantity::ctf: return "ctf";
    case DeltaQuantity::admittance: return "admittance";
    case DeltaQuantity::reflection: return "reflection";
  }
  return "unknown";
}

namespace {

DeltaQuantity quantity_of(const MatrixSpectrum& s) {
  switch (s.kind) {
    case SpectrumKind::admittance: return DeltaQuantity::admittance;
    case SpectrumKind::reflection: return DeltaQuantity::reflection;
    case SpectrumKind::ctf: return DeltaQuantity::ctf;
    case SpectrumKind::delta: break;
  }
  throw ValidationError("delta: baseline must be an admittance, reflection or ctf spectrum");
}

void check_compatible(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline) {
  if (!(perturbed.grid == baseline.grid)) throw ValidationError("delta: spectra are on different grids");
  if (perturbed.kind != baseline.kind) throw ValidationError("delta: spectra hold different quantities");
  if (perturbed.conductors() != baseline.conductors()) throw ValidationError("delta: conductor counts differ");
}

std::vector<CMatrix> ratio(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline, bool minus_identity) {
  std::vector<CMatrix> out(baseline.size());
  for (std::size_t k = 0; k < baseline.size(); ++k) {
    const CMatrix numerator = minus_identity ? CMatrix(perturbed[k] - baseline[k]) : perturbed[k];
    try {
      out[k] = solve_right(numerator, baseline[k], "baseline response");
    } catch (const SingularityError& e) {
      throw SingularityError(e.what(), baseline.grid.frequency(k));
    }
  }
  return out;
}

}  // namespace

DeltaSpectrum delta_chain(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline) {
  check_compatible(perturbed, baseline);
  const DeltaQuantity q = quantity_of(baseline);
  DeltaSpectrum out{DeltaModel::chain, q,
                    MatrixSpectrum(baseline.grid, ratio(perturbed, baseline, false), SpectrumKind::delta),
                    std::nullopt};
  if (q == DeltaQuantity::reflection) {
    out.warning = "chain model on reflection coefficients is unreliable where rho_in is close to zero";
  }
  return out;
}

DeltaSpectrum delta_superposition(const MatrixSpectrum& perturbed, const MatrixSpectrum& baseline, bool normalize) {
  check_compatible(perturbed, baseline);
  const DeltaQuantity q = quantity_of(baseline);
  if (normalize) {
    return {DeltaModel::superposition_normalized, q,
            MatrixSpectrum(baseline.grid, ratio(perturbed, baseline, true), SpectrumKind::delta), std::nullopt};
  }
  std::vector<CMatrix> diff(baseline.size());
  for (std::size_t k = 0; k < baseline.size(); ++k) diff[k] = perturbed[k] - baseline[k];
  return {DeltaModel::superposition, q, MatrixSpectrum(baseline.grid, std::move(diff), SpectrumKind::delta),
          std::nullopt};
}

}  // namespace mtlnet
