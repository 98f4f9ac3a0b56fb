#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtlnet/linalg.hpp"
#include "mtlnet/spectrum.hpp"

namespace mtlnet {

enum class Window { rect, hann };

std::string_view to_string(Window window);

/// Real L x L matrix samples on a uniform time axis t_n = n * t_step.
struct TimeTrace {
  double t_step = 0.0;
  std::vector<RMatrix> samples;
  SpectrumKind origin = SpectrumKind::admittance;
  std::string tag;

  std::size_t size() const noexcept { return samples.size(); }
  int conductors() const noexcept { return samples.empty() ? 0 : static_cast<int>(samples.front().rows()); }
  double time(std::size_t n) const noexcept { return static_cast<double>(n) * t_step; }
  std::vector<double> entry(int row, int col) const;
  /// Sum of squared samples over [begin, end) for all entries.
  double energy(std::size_t begin, std::size_t end) const;
  double energy() const { return energy(0, samples.size()); }
};

/// Inverse Fourier transform of a one-sided spectrum on f_start + k f_step.
///
/// The spectrum is extended down to DC by linear extrapolation from its two lowest
/// points (f_start must be a multiple of f_step), tapered by the window (a half Hann
/// taper that is 1 at DC and 0 at f_max), made Hermitian and inverse transformed to a
/// real trace of 2 (M - 1) samples, M being the number of points from DC to f_max.
/// The scaling is the discrete one: a constant unit spectrum maps to a unit impulse.
TimeTrace to_time_domain(const MatrixSpectrum& spectrum, Window window = Window::hann, std::string tag = {});

struct Peak {
  double time = 0.0;       // s
  std::size_t sample = 0;
  double amplitude = 0.0;  // signed sample value
  double width = 0.0;      // full width at half maximum, s
  int row = 0;
  int col = 0;
};

struct PeakOptions {
  double rel_threshold = 0.05;
  std::size_t min_separation = 3;  // samples; also the launch region length
};

struct PeakList {
  /// Peaks per matrix entry, row-major, times strictly increasing.
  std::vector<std::vector<Peak>> entries;
  /// Strongest sample of the launch region (t near 0) per entry, when above threshold.
  std::vector<Peak> launch;
  int conductors = 0;

  const std::vector<Peak>& at(int row, int col) const {
    return entries[static_cast<std::size_t>(row * conductors + col)];
  }
  /// Union over entries; peaks closer than `merge_samples` are merged keeping the strongest.
  std::vector<Peak> aggregated(std::size_t merge_samples) const;
  bool empty() const;
};

/// Local maxima of |entry| above rel_threshold * max|entry|, at least min_separation
/// samples apart. The first and last min_separation samples (the launch artifact at
/// t = 0 and its circular wrap) are reported separately.
PeakList detect_peaks(const TimeTrace& trace, const PeakOptions& options = {});

enum class DistanceMode { reflectometric, end_to_end };

/// reflectometric: d = v t / 2; end_to_end: d = v t.
double time_to_distance(double time, double velocity, DistanceMode mode);
std::vector<double> time_to_distance(const std::vector<Peak>& peaks, double velocity, DistanceMode mode);

struct LocateResult {
  bool found = false;
  double distance = 0.0;    // m
  double time = 0.0;        // s
  double confidence = 0.0;  // peak amplitude / max amplitude
};

/// Distance of the first peak after the launch artifact in a reflectometric delta trace.
LocateResult locate_anomaly_reflectometric(const TimeTrace& delta_trace, double velocity,
                                           const PeakOptions& options = {});

struct SymmetryResult {
  enum class Verdict { symmetric, asymmetric, inconclusive };
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> spacings_ab;  // s
  std::vector<double> spacings_ba;  // s
  std::string report;

  bool symmetric() const noexcept { return verdict == Verdict::symmetric; }
};

/// Compares consecutive peak spacings of two reciprocal-direction traces. Peaks are
/// aggregated over entries; amplitudes are ignored. A peak present in one trace only is
/// tolerated when it is weak (below `confirm_ratio` times the detection threshold),
/// since detection of weak peaks depends on amplitude.
SymmetryResult check_peak_spacing_symmetry(const TimeTrace& trace_ab, const TimeTrace& trace_ba, double tol_samples,
                                           const PeakOptions& options = {}, double confirm_ratio = 3.0);

}  // namespace mtlnet
