#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mtlnet/spectral.hpp"
#include "mtlnet/spectrum.hpp"
#include "topology_io.hpp"

namespace mtlnet::cli {

/// Writes files below one directory; an optional timestamp comment heads every file.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, bool timestamp);

  const std::filesystem::path& directory() const noexcept { return dir_; }
  const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

  void spectrum(const std::string& name, const MatrixSpectrum& s);
  void trace(const std::string& name, const TimeTrace& t);
  /// Peaks with distances computed from `velocity` in `mode`.
  void peaks(const std::string& name, const PeakList& peaks, double velocity, DistanceMode mode);
  void json_file(const std::string& name, const json& j);
  void text(const std::string& name, const std::string& content);

 private:
  std::filesystem::path open_path(const std::string& name);
  std::string header() const;

  std::filesystem::path dir_;
  bool timestamp_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace mtlnet::cli
