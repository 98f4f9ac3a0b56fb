#include "mtlnet/frequency_grid.hpp"

#include <cmath>

#include "mtlnet/error.hpp"

namespace mtlnet {

FrequencyGrid::FrequencyGrid(double f_start, double f_step, std::size_t n_points)
    : f_start_(f_start), f_step_(f_step), n_points_(n_points) {
  if (!(f_start > 0.0) || !std::isfinite(f_start)) {
    throw ValidationError("frequency grid: f_start must be positive");
  }
  if (!(f_step > 0.0) || !std::isfinite(f_step)) {
    throw ValidationError("frequency grid: f_step must be positive");
  }
  if (n_points < 2) throw ValidationError("frequency grid: at least two points required");
}

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> out(n_points_);
  for (std::size_t k = 0; k < n_points_; ++k) out[k] = frequency(k);
  return out;
}

}  // namespace mtlnet
