#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "mtlnet/anomaly.hpp"
#include "mtlnet/cable.hpp"
#include "mtlnet/error.hpp"
#include "mtlnet/network.hpp"

namespace mtlnet::cli {

using json = nlohmann::ordered_json;

/// Malformed input file; the message carries the offending field path.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

using CableLibrary = std::map<std::string, CableSpec>;

/// Built-in cables plus those of the library file (MTLNET_CABLE_LIBRARY overrides
/// the bundled path).
CableLibrary load_cable_library();
std::filesystem::path cable_library_path();

json read_json_file(const std::filesystem::path& path);

NetworkTopology topology_from_json(const json& j, const CableLibrary& library);
json topology_to_json(const NetworkTopology& net);
NetworkTopology read_topology(const std::filesystem::path& path, const CableLibrary& library);

Anomaly anomaly_from_json(const json& j, const NetworkTopology& net, const CableLibrary& library);
json anomaly_to_json(const Anomaly& anomaly);

AdmittanceModel admittance_from_json(const json& j, const std::string& where);
json admittance_to_json(const AdmittanceModel& model);
CableSpec cable_from_json(const std::string& label, const json& j, const std::string& where);
json cable_to_json(const CableSpec& cable);

}  // namespace mtlnet::cli
