#pragma once

#include <cstddef>
#include <vector>

namespace mtlnet {

/// Uniform frequency grid f_k = f_start + k * f_step, k = 0 .. n_points-1.
class FrequencyGrid {
 public:
  /// Throws ValidationError unless f_start > 0, f_step > 0 and n_points >= 2.
  FrequencyGrid(double f_start, double f_step, std::size_t n_points);

  double f_start() const noexcept { return f_start_; }
  double f_step() const noexcept { return f_step_; }
  std::size_t size() const noexcept { return n_points_; }
  double frequency(std::size_t k) const noexcept {
    return f_start_ + static_cast<double>(k) * f_step_;
  }
  double f_max() const noexcept { return frequency(n_points_ - 1); }
  std::vector<double> frequencies() const;

  /// Default analysis band: 100 kHz to 80 MHz in 100 kHz steps.
  static FrequencyGrid plc_default() { return FrequencyGrid(100e3, 100e3, 800); }

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  double f_start_;
  double f_step_;
  std::size_t n_points_;
};

}  // namespace mtlnet
