#include "output.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace mtlnet::cli {

OutputWriter::OutputWriter(std::filesystem::path dir, bool timestamp) : dir_(std::move(dir)), timestamp_(timestamp) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

std::string OutputWriter::header() const {
  if (!timestamp_) return {};
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("# generated {:%Y-%m-%dT%H:%M:%SZ}\n", now);
}

std::filesystem::path OutputWriter::open_path(const std::string& name) {
  auto path = dir_ / name;
  written_.push_back(path);
  return path;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ValidationError("write to '" + path.string() + "' failed");
}

}  // namespace

void OutputWriter::spectrum(const std::string& name, const MatrixSpectrum& s) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}f_or_t,entry_row,entry_col,re,im\n", header());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = s.grid.frequency(k);
    for (Eigen::Index r = 0; r < s[k].rows(); ++r) {
      for (Eigen::Index c = 0; c < s[k].cols(); ++c) {
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}\n", f, r, c, s[k](r, c).real(), s[k](r, c).imag());
      }
    }
  }
  write_file(open_path(name), fmt::to_string(buf));
}

void OutputWriter::trace(const std::string& name, const TimeTrace& t) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}f_or_t,entry_row,entry_col,re,im\n", header());
  for (std::size_t n = 0; n < t.size(); ++n) {
    for (Eigen::Index r = 0; r < t.samples[n].rows(); ++r) {
      for (Eigen::Index c = 0; c < t.samples[n].cols(); ++c) {
        fmt::format_to(std::back_inserter(buf), "{},{},{},{},0\n", t.time(n), r, c, t.samples[n](r, c));
      }
    }
  }
  write_file(open_path(name), fmt::to_string(buf));
}

void OutputWriter::peaks(const std::string& name, const PeakList& peaks, double velocity, DistanceMode mode) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}time_s,distance_m,amplitude,entry\n", header());
  std::vector<Peak> all;
  for (const auto& entry : peaks.entries) all.insert(all.end(), entry.begin(), entry.end());
  std::stable_sort(all.begin(), all.end(), [](const Peak& a, const Peak& b) { return a.sample < b.sample; });
  for (const auto& p : all) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{}:{}\n", p.time, time_to_distance(p.time, velocity, mode),
                   p.amplitude, p.row, p.col);
  }
  write_file(open_path(name), fmt::to_string(buf));
}

void OutputWriter::json_file(const std::string& name, const json& j) {
  json out = j;
  if (timestamp_ && out.is_object()) {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    out["generated"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
  }
  write_file(open_path(name), out.dump(2) + "\n");
}

void OutputWriter::text(const std::string& name, const std::string& content) {
  write_file(open_path(name), header() + content);
}

}  // namespace mtlnet::cli
