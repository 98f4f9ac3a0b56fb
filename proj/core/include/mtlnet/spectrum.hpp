#pragma once

#include <string_view>
#include <vector>

#include "mtlnet/frequency_grid.hpp"
#include "mtlnet/linalg.hpp"

namespace mtlnet {

enum class SpectrumKind { admittance, reflection, ctf, delta };

std::string_view to_string(SpectrumKind kind);

/// One L x L complex matrix per grid point.
struct MatrixSpectrum {
  FrequencyGrid grid;
  std::vector<CMatrix> values;
  SpectrumKind kind = SpectrumKind::admittance;

  MatrixSpectrum(FrequencyGrid g, std::vector<CMatrix> v, SpectrumKind k);

  std::size_t size() const noexcept { return values.size(); }
  int conductors() const noexcept { return values.empty() ? 0 : static_cast<int>(values.front().rows()); }
  const CMatrix& operator[](std::size_t k) const { return values[k]; }
};

/// Largest relative difference over the grid (see relative_difference).
double max_relative_difference(const MatrixSpectrum& a, const MatrixSpectrum& b);

/// Largest |entry| over the whole spectrum.
double max_abs_entry(const MatrixSpectrum& s);

}  // namespace mtlnet
