#include "mtlnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Ignore entries that are numerically zero compared with the strongest entry.
constexpr double kNegligibleEntry = 1e-9;

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double half_max_width(const std::vector<double>& mag, std::size_t i, double t_step) {
  const double half = 0.5 * mag[i];
  std::size_t lo = i, hi = i;
  while (lo > 0 && mag[lo - 1] >= half) --lo;
  while (hi + 1 < mag.size() && mag[hi + 1] >= half) ++hi;
  return static_cast<double>(hi - lo + 1) * t_step;
}

}  // namespace

std::string_view to_string(Window window) { return window == Window::hann ? "hann" : "rect"; }

std::vector<double> TimeTrace::entry(int row, int col) const {
  std::vector<double> out(samples.size());
  for (std::size_t n = 0; n < samples.size(); ++n) out[n] = samples[n](row, col);
  return out;
}

double TimeTrace::energy(std::size_t begin, std::size_t end) const {
  double e = 0.0;
  for (std::size_t n = begin; n < std::min(end, samples.size()); ++n) e += samples[n].squaredNorm();
  return e;
}

TimeTrace to_time_domain(const MatrixSpectrum& spectrum, Window window, std::string tag) {
  const FrequencyGrid& grid = spectrum.grid;
  const double offset = grid.f_start() / grid.f_step();
  const auto first_index = static_cast<std::size_t>(std::llround(offset));
  if (std::abs(offset - static_cast<double>(first_index)) > 1e-6 * std::max(1.0, offset)) {
    throw ValidationError("to_time_domain: grid does not extend uniformly to DC (f_start must be a multiple of f_step)");
  }
  const std::size_t m = first_index + grid.size() - 1;  // index of f_max
  const std::size_t n_fft = 2 * m;
  const int l = spectrum.conductors();

  std::unique_ptr<fftw_complex[], FftwFree> in(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (m + 1))));
  std::unique_ptr<double[], FftwFree> out(static_cast<double*>(fftw_malloc(sizeof(double) * n_fft)));
  FftwPlan plan(fftw_plan_dft_c2r_1d(static_cast<int>(n_fft), in.get(), out.get(), FFTW_ESTIMATE));

  std::vector<double> taper(m + 1, 1.0);
  if (window == Window::hann) {
    for (std::size_t j = 0; j <= m; ++j) {
      taper[j] = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(m)));
    }
  }

  TimeTrace trace;
  trace.t_step = 1.0 / (2.0 * grid.f_max());
  trace.samples.assign(n_fft, RMatrix::Zero(l, l));
  trace.origin = spectrum.kind;
  trace.tag = std::move(tag);

  for (int r = 0; r < l; ++r) {
    for (int c = 0; c < l; ++c) {
      const Complex x0 = spectrum[0](r, c);
      const Complex slope = spectrum[1](r, c) - x0;
      for (std::size_t j = 0; j <= m; ++j) {
        Complex x = j >= first_index ? spectrum[j - first_index](r, c)
                                     : x0 + slope * (static_cast<double>(j) - static_cast<double>(first_index));
        x *= taper[j];
        if (j == 0 || j == m) x = Complex(x.real(), 0.0);
        in[j][0] = x.real();
        in[j][1] = x.imag();
      }
      fftw_execute(plan.get());
      for (std::size_t n = 0; n < n_fft; ++n) trace.samples[n](r, c) = out[n] / static_cast<double>(n_fft);
    }
  }
  return trace;
}

bool PeakList::empty() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.empty(); });
}

std::vector<Peak> PeakList::aggregated(std::size_t merge_samples) const {
  std::vector<Peak> all;
  for (const auto& e : entries) all.insert(all.end(), e.begin(), e.end());
  std::sort(all.begin(), all.end(), [](const Peak& a, const Peak& b) { return a.sample < b.sample; });
  std::vector<Peak> merged;
  for (const Peak& p : all) {
    if (!merged.empty() && p.sample - merged.back().sample < std::max<std::size_t>(merge_samples, 1)) {
      if (std::abs(p.amplitude) > std::abs(merged.back().amplitude)) merged.back() = p;
      continue;
    }
    merged.push_back(p);
  }
  return merged;
}

PeakList detect_peaks(const TimeTrace& trace, const PeakOptions& options) {
  if (!(options.rel_threshold > 0.0) || !(options.rel_threshold < 1.0)) {
    throw ValidationError("detect_peaks: rel_threshold must lie in (0, 1)");
  }
  const int l = trace.conductors();
  PeakList out;
  out.conductors = l;
  out.entries.resize(static_cast<std::size_t>(l * l));
  const std::size_t n = trace.size();
  const std::size_t sep = std::max<std::size_t>(options.min_separation, 1);

  double global_max = 0.0;
  for (const auto& s : trace.samples) global_max = std::max(global_max, s.cwiseAbs().maxCoeff());
  if (global_max == 0.0 || n < 2 * sep + 3) return out;

  for (int r = 0; r < l; ++r) {
    for (int c = 0; c < l; ++c) {
      const std::vector<double> x = trace.entry(r, c);
      const double entry_max = max_abs(x);
      if (entry_max <= kNegligibleEntry * global_max) continue;
      const double threshold = options.rel_threshold * entry_max;
      std::vector<double> mag(n);
      for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(x[i]);

      auto make_peak = [&](std::size_t i) {
        return Peak{trace.time(i), i, x[i], half_max_width(mag, i, trace.t_step), r, c};
      };

      std::size_t launch = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i >= sep && i < n - sep) continue;
        if (mag[i] > mag[launch]) launch = i;
      }
      if (mag[launch] >= threshold) out.launch.push_back(make_peak(launch));

      std::vector<std::size_t> candidates;
      for (std::size_t i = sep; i < n - sep; ++i) {
        if (mag[i] >= threshold && mag[i] >= mag[i - 1] && mag[i] > mag[i + 1]) candidates.push_back(i);
      }
      std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
      std::vector<std::size_t> accepted;
      for (std::size_t i : candidates) {
        const bool isolated = std::all_of(accepted.begin(), accepted.end(), [&](std::size_t j) {
          return (i > j ? i - j : j - i) >= sep;
        });
        if (isolated) accepted.push_back(i);
      }
      std::sort(accepted.begin(), accepted.end());
      auto& dst = out.entries[static_cast<std::size_t>(r * l + c)];
      for (std::size_t i : accepted) dst.push_back(make_peak(i));
    }
  }
  return out;
}

double time_to_distance(double time, double velocity, DistanceMode mode) {
  if (!(velocity > 0.0)) throw ValidationError("time_to_distance: velocity must be positive");
  return mode == DistanceMode::reflectometric ? velocity * time / 2.0 : velocity * time;
}

std::vector<double> time_to_distance(const std::vector<Peak>& peaks, double velocity, DistanceMode mode) {
  std::vector<double> out;
  out.reserve(peaks.size());
  for (const Peak& p : peaks) out.push_back(time_to_distance(p.time, velocity, mode));
  return out;
}

LocateResult locate_anomaly_reflectometric(const TimeTrace& delta_trace, double velocity, const PeakOptions& options) {
  if (!(velocity > 0.0)) throw ValidationError("locate: velocity must be positive");
  const std::vector<Peak> peaks = detect_peaks(delta_trace, options).aggregated(options.min_separation);
  double max_amp = 0.0;
  for (const auto& s : delta_trace.samples) max_amp = std::max(max_amp, s.cwiseAbs().maxCoeff());
  LocateResult out;
  // weak entries can carry peaks that are only strong relative to themselves
  const auto first = std::find_if(peaks.begin(), peaks.end(), [&](const Peak& p) {
    return std::abs(p.amplitude) >= options.rel_threshold * max_amp;
  });
  if (first == peaks.end() || max_amp == 0.0) return out;
  out.found = true;
  out.time = first->time;
  out.distance = time_to_distance(out.time, velocity, DistanceMode::reflectometric);
  out.confidence = std::abs(first->amplitude) / max_amp;
  return out;
}

namespace {

std::vector<double> spacings(const std::vector<double>& times) {
  std::vector<double> out;
  for (std::size_t i = 1; i < times.size(); ++i) out.push_back(times[i] - times[i - 1]);
  return out;
}

double strongest(const std::vector<Peak>& peaks) {
  double m = 0.0;
  for (const auto& p : peaks) m = std::max(m, std::abs(p.amplitude));
  return m;
}

}  // namespace

SymmetryResult check_peak_spacing_symmetry(const TimeTrace& trace_ab, const TimeTrace& trace_ba, double tol_samples,
                                           const PeakOptions& options, double confirm_ratio) {
  if (std::abs(trace_ab.t_step - trace_ba.t_step) > 1e-12 * trace_ab.t_step) {
    throw ValidationError("peak symmetry: traces use different time steps");
  }
  const double t_step = trace_ab.t_step;
  const auto merge = std::max<std::size_t>(options.min_separation, 1);
  const std::vector<Peak> a = detect_peaks(trace_ab, options).aggregated(merge);
  const std::vector<Peak> b = detect_peaks(trace_ba, options).aggregated(merge);

  SymmetryResult result;
  std::ostringstream report;
  if (a.size() < 2 || b.size() < 2) {
    report << "inconclusive: " << a.size() << " and " << b.size() << " peaks";
    result.report = report.str();
    return result;
  }

  const double max_a = strongest(a);
  const double max_b = strongest(b);
  const double strong = std::min(1.0, confirm_ratio * options.rel_threshold);
  std::vector<bool> used_b(b.size(), false);
  std::vector<double> times_a, times_b;
  std::vector<bool> matched_a(a.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t best = b.size();
    double best_gap = tol_samples + 1e-9;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used_b[j]) continue;
      const double gap = std::abs(a[i].time - b[j].time) / t_step;
      if (gap <= best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best < b.size()) {
      used_b[best] = true;
      matched_a[i] = true;
      times_a.push_back(a[i].time);
      times_b.push_back(b[best].time);
    }
  }

  bool asymmetric = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!matched_a[i] && std::abs(a[i].amplitude) >= strong * max_a) {
      report << "A->B peak at " << a[i].time << " s has no counterpart; ";
      asymmetric = true;
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used_b[j] && std::abs(b[j].amplitude) >= strong * max_b) {
      report << "B->A peak at " << b[j].time << " s has no counterpart; ";
      asymmetric = true;
    }
  }

  std::vector<std::size_t> order(times_b.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return times_a[x] < times_a[y]; });
  std::vector<double> sorted_a, sorted_b;
  for (std::size_t i : order) {
    sorted_a.push_back(times_a[i]);
    sorted_b.push_back(times_b[i]);
  }
  result.spacings_ab = spacings(sorted_a);
  result.spacings_ba = spacings(sorted_b);
  for (std::size_t i = 0; i < result.spacings_ab.size(); ++i) {
    if (std::abs(result.spacings_ab[i] - result.spacings_ba[i]) > (tol_samples + 1e-9) * t_step) {
      report << "spacing " << i << " differs: " << result.spacings_ab[i] << " vs " << result.spacings_ba[i] << " s; ";
      asymmetric = true;
    }
  }

  if (asymmetric) {
    result.verdict = SymmetryResult::Verdict::asymmetric;
  } else if (sorted_a.size() < 2) {
    report << "inconclusive: fewer than two matched peaks";
  } else {
    result.verdict = SymmetryResult::Verdict::symmetric;
    report << sorted_a.size() << " matched peaks, all spacings within " << tol_samples << " samples";
  }
  result.report = report.str();
  return result;
}

}  // namespace mtlnet
