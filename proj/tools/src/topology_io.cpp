#include "topology_io.hpp"

#include <cstdlib>
#include <fstream>

namespace mtlnet::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where, "missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

double number_field(const json& j, const std::string& key, const std::string& where, double fallback) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Complex complex_value(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(where, "expected a complex number [re, im]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

template <typename Scalar, typename Reader>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix(const json& j, const std::string& where,
                                                              Reader read) {
  if (!j.is_array() || j.empty()) fail(where, "expected a square matrix (array of rows)");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail(rw, "row length differs from row count");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = read(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

RMatrix real_matrix(const json& j, const std::string& where) { return matrix<double>(j, where, number); }
CMatrix complex_matrix(const json& j, const std::string& where) { return matrix<Complex>(j, where, complex_value); }

json to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

AdmittanceModel::Term term_from_json(const json& j, const std::string& where) {
  const std::string model = text(field(j, "model", where), where + ".model");
  if (model == "constant") return ConstantAdmittance{complex_matrix(field(j, "value", where), where + ".value")};
  if (model == "conductance") {
    const int n = static_cast<int>(number(field(j, "conductors", where), where + ".conductors"));
    if (n < 1) fail(where + ".conductors", "must be positive");
    return ConstantAdmittance{CMatrix::Identity(n, n) * number(field(j, "value", where), where + ".value")};
  }
  if (model == "parallel_rc") {
    return ParallelRC{numbers(field(j, "resistance", where), where + ".resistance"),
                      numbers(field(j, "capacitance", where), where + ".capacitance")};
  }
  if (model == "table") {
    TabulatedAdmittance t;
    t.frequencies = numbers(field(j, "frequencies", where), where + ".frequencies");
    const json& values = field(j, "values", where);
    if (!values.is_array()) fail(where + ".values", "expected an array of matrices");
    for (std::size_t i = 0; i < values.size(); ++i) {
      t.values.push_back(complex_matrix(values[i], where + ".values[" + std::to_string(i) + "]"));
    }
    return t;
  }
  fail(where + ".model", "unknown admittance model '" + model + "'");
}

json term_to_json(const AdmittanceModel::Term& term) {
  struct Writer {
    json operator()(const ConstantAdmittance& t) const { return {{"model", "constant"}, {"value", to_json(t.value)}}; }
    json operator()(const ParallelRC& t) const {
      return {{"model", "parallel_rc"}, {"resistance", t.resistance}, {"capacitance", t.capacitance}};
    }
    json operator()(const TabulatedAdmittance& t) const {
      json values = json::array();
      for (const auto& v : t.values) values.push_back(to_json(v));
      return {{"model", "table"}, {"frequencies", t.frequencies}, {"values", values}};
    }
  };
  return std::visit(Writer{}, term);
}

PulParameters pul_from_json(const json& j, const std::string& where) {
  return {real_matrix(field(j, "r", where), where + ".r"), real_matrix(field(j, "l", where), where + ".l"),
          real_matrix(field(j, "g", where), where + ".g"), real_matrix(field(j, "c", where), where + ".c")};
}

json pul_to_json(const RMatrix& r, const RMatrix& l, const RMatrix& g, const RMatrix& c) {
  return {{"r", to_json(r)}, {"l", to_json(l)}, {"g", to_json(g)}, {"c", to_json(c)}};
}

template <typename Fn>
auto guarded(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

}  // namespace

std::filesystem::path cable_library_path() {
  if (const char* env = std::getenv("MTLNET_CABLE_LIBRARY"); env && *env) return env;
  return MTLNET_DEFAULT_CABLE_LIBRARY;
}

CableLibrary load_cable_library() {
  CableLibrary lib;
  for (int n = 1; n <= 4; ++n) {
    const CableSpec c = CableSpec::default_cable(n);
    lib.emplace(c.label(), c);
  }
  const auto path = cable_library_path();
  if (!std::filesystem::exists(path)) {
    if (std::getenv("MTLNET_CABLE_LIBRARY")) throw ParseError("cable library '" + path.string() + "' not found");
    return lib;
  }
  const json j = read_json_file(path);
  const json& cables = field(j, "cables", path.string());
  if (!cables.is_object()) fail(path.string() + ".cables", "expected an object");
  for (const auto& [name, spec] : cables.items()) {
    lib.insert_or_assign(name, cable_from_json(name, spec, path.string() + ".cables." + name));
  }
  return lib;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

AdmittanceModel admittance_from_json(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<AdmittanceModel::Term> terms;
    for (std::size_t i = 0; i < j.size(); ++i) terms.push_back(term_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return guarded(where, [&] { return AdmittanceModel(std::move(terms)); });
  }
  if (j.is_object() && j.contains("model") && j.at("model") == "open") return {};
  return guarded(where, [&] { return AdmittanceModel({term_from_json(j, where)}); });
}

json admittance_to_json(const AdmittanceModel& model) {
  if (model.empty()) return {{"model", "open"}};
  if (model.terms().size() == 1) return term_to_json(model.terms().front());
  json terms = json::array();
  for (const auto& t : model.terms()) terms.push_back(term_to_json(t));
  return terms;
}

CableSpec cable_from_json(const std::string& label, const json& j, const std::string& where) {
  const std::string model = text(field(j, "model", where), where + ".model");
  if (model == "coupled") {
    CoupledCableModel m;
    m.conductors = static_cast<int>(number_field(j, "conductors", where, m.conductors));
    m.r0 = number_field(j, "r0", where, m.r0);
    m.skin_reference = number_field(j, "skin_reference", where, m.skin_reference);
    m.l = number_field(j, "l", where, m.l);
    m.c = number_field(j, "c", where, m.c);
    m.loss_tangent = number_field(j, "loss_tangent", where, m.loss_tangent);
    m.coupling_l = number_field(j, "coupling_l", where, m.coupling_l);
    m.coupling_c = number_field(j, "coupling_c", where, m.coupling_c);
    return guarded(where, [&] { return CableSpec(label, m); });
  }
  if (model == "constant") {
    const PulParameters p = pul_from_json(j, where);
    return guarded(where, [&] { return CableSpec(label, ConstantCableModel{p.r, p.l, p.g, p.c}); });
  }
  if (model == "table") {
    TabulatedCableModel t;
    t.frequencies = numbers(field(j, "frequencies", where), where + ".frequencies");
    const json& values = field(j, "values", where);
    if (!values.is_array()) fail(where + ".values", "expected an array");
    for (std::size_t i = 0; i < values.size(); ++i) {
      t.values.push_back(pul_from_json(values[i], where + ".values[" + std::to_string(i) + "]"));
    }
    return guarded(where, [&] { return CableSpec(label, std::move(t)); });
  }
  fail(where + ".model", "unknown cable model '" + model + "'");
}

json cable_to_json(const CableSpec& cable) {
  struct Writer {
    json operator()(const CoupledCableModel& m) const {
      return {{"model", "coupled"},   {"conductors", m.conductors},     {"r0", m.r0},
              {"skin_reference", m.skin_reference}, {"l", m.l},        {"c", m.c},
              {"loss_tangent", m.loss_tangent},     {"coupling_l", m.coupling_l}, {"coupling_c", m.coupling_c}};
    }
    json operator()(const ConstantCableModel& m) const {
      json j = pul_to_json(m.r, m.l, m.g, m.c);
      j["model"] = "constant";
      return j;
    }
    json operator()(const TabulatedCableModel& m) const {
      json values = json::array();
      for (const auto& p : m.values) values.push_back(pul_to_json(p.r, p.l, p.g, p.c));
      return {{"model", "table"}, {"frequencies", m.frequencies}, {"values", values}};
    }
  };
  return std::visit(Writer{}, cable.model());
}

NetworkTopology topology_from_json(const json& j, const CableLibrary& library) {
  NetworkTopology net;
  const json& nodes = field(j, "nodes", "topology");
  if (!nodes.is_array()) fail("nodes", "expected an array of names");
  for (std::size_t i = 0; i < nodes.size(); ++i) net.nodes.push_back(text(nodes[i], "nodes[" + std::to_string(i) + "]"));

  if (j.contains("cables")) {
    const json& cables = j.at("cables");
    if (!cables.is_object()) fail("cables", "expected an object");
    for (const auto& [name, spec] : cables.items()) {
      const std::string where = "cables." + name;
      if (spec.is_string()) {
        const auto it = library.find(spec.get<std::string>());
        if (it == library.end()) fail(where, "unknown library cable '" + spec.get<std::string>() + "'");
        net.cables.emplace(name, CableSpec(name, it->second.model()));
      } else {
        net.cables.emplace(name, cable_from_json(name, spec, where));
      }
    }
  }

  const json& branches = field(j, "branches", "topology");
  if (!branches.is_array()) fail("branches", "expected an array");
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string where = "branches[" + std::to_string(i) + "]";
    const json& b = branches[i];
    Branch br{text(field(b, "id", where), where + ".id"), text(field(b, "from", where), where + ".from"),
              text(field(b, "to", where), where + ".to"), text(field(b, "cable", where), where + ".cable"),
              number(field(b, "length", where), where + ".length")};
    if (!net.cables.count(br.cable)) {
      const auto it = library.find(br.cable);
      if (it == library.end()) fail(where + ".cable", "unknown cable '" + br.cable + "'");
      net.cables.emplace(br.cable, it->second);
    }
    net.branches.push_back(std::move(br));
  }

  if (j.contains("loads")) {
    if (!j.at("loads").is_object()) fail("loads", "expected an object");
    for (const auto& [node, spec] : j.at("loads").items()) {
      net.loads.emplace(node, admittance_from_json(spec, "loads." + node));
    }
  }
  if (j.contains("ports")) {
    if (!j.at("ports").is_object()) fail("ports", "expected an object");
    for (const auto& [name, spec] : j.at("ports").items()) {
      const std::string where = "ports." + name;
      Port p{text(field(spec, "node", where), where + ".node"), {}};
      if (spec.contains("source")) p.source = admittance_from_json(spec.at("source"), where + ".source");
      net.ports.emplace(name, std::move(p));
    }
  }
  return net;
}

json topology_to_json(const NetworkTopology& net) {
  json j;
  j["nodes"] = net.nodes;
  json branches = json::array();
  for (const auto& b : net.branches) {
    branches.push_back({{"id", b.id}, {"from", b.node_a}, {"to", b.node_b}, {"cable", b.cable}, {"length", b.length}});
  }
  j["branches"] = branches;
  json loads = json::object();
  for (const auto& [node, load] : net.loads) loads[node] = admittance_to_json(load);
  j["loads"] = loads;
  json ports = json::object();
  for (const auto& [name, port] : net.ports) {
    ports[name] = {{"node", port.node}, {"source", admittance_to_json(port.source)}};
  }
  j["ports"] = ports;
  json cables = json::object();
  for (const auto& [name, cable] : net.cables) cables[name] = cable_to_json(cable);
  j["cables"] = cables;
  return j;
}

NetworkTopology read_topology(const std::filesystem::path& path, const CableLibrary& library) {
  const json j = read_json_file(path);
  try {
    return topology_from_json(j, library);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Anomaly anomaly_from_json(const json& j, const NetworkTopology& net, const CableLibrary& library) {
  const std::string type = text(field(j, "type", "anomaly"), "anomaly.type");
  if (type == "lumped_fault") {
    return LumpedFault{text(field(j, "branch", "anomaly"), "anomaly.branch"),
                       number(field(j, "offset", "anomaly"), "anomaly.offset"),
                       admittance_from_json(field(j, "admittance", "anomaly"), "anomaly.admittance"),
                       j.value("active", false)};
  }
  if (type == "load_change") {
    return LoadChange{text(field(j, "node", "anomaly"), "anomaly.node"),
                      admittance_from_json(field(j, "load", "anomaly"), "anomaly.load")};
  }
  if (type == "distributed_fault") {
    const std::string branch = text(field(j, "branch", "anomaly"), "anomaly.branch");
    const json& cable = field(j, "cable", "anomaly");
    const std::string label = j.value("cable_label", branch + ".degraded");
    std::optional<CableSpec> degraded;
    if (cable.is_string()) {
      const std::string name = cable.get<std::string>();
      if (const auto it = net.cables.find(name); it != net.cables.end()) {
        degraded = it->second;
      } else if (const auto lit = library.find(name); lit != library.end()) {
        degraded = lit->second;
      } else {
        fail("anomaly.cable", "unknown cable '" + name + "'");
      }
    } else {
      degraded = cable_from_json(label, cable, "anomaly.cable");
    }
    return DistributedFault{branch, number(field(j, "start", "anomaly"), "anomaly.start"),
                            number(field(j, "extent", "anomaly"), "anomaly.extent"), *degraded};
  }
  fail("anomaly.type", "unknown anomaly type '" + type + "'");
}

json anomaly_to_json(const Anomaly& anomaly) {
  struct Writer {
    json operator()(const LumpedFault& a) const {
      return {{"type", "lumped_fault"}, {"branch", a.branch}, {"offset", a.offset},
              {"admittance", admittance_to_json(a.admittance)}, {"active", a.active}};
    }
    json operator()(const LoadChange& a) const {
      return {{"type", "load_change"}, {"node", a.node}, {"load", admittance_to_json(a.new_load)}};
    }
    json operator()(const DistributedFault& a) const {
      return {{"type", "distributed_fault"}, {"branch", a.branch}, {"start", a.start}, {"extent", a.extent},
              {"cable", cable_to_json(a.degraded)}};
    }
  };
  return std::visit(Writer{}, anomaly);
}

}  // namespace mtlnet::cli
