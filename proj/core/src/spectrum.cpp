#include "mtlnet/spectrum.hpp"

#include <algorithm>

#include "mtlnet/error.hpp"

namespace mtlnet {

std::string_view to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::admittance: return "admittance";
    case SpectrumKind::reflection: return "reflection";
    case SpectrumKind::ctf: return "ctf";
    case SpectrumKind::delta: return "delta";
  }
  return "unknown";
}

MatrixSpectrum::MatrixSpectrum(FrequencyGrid g, std::vector<CMatrix> v, SpectrumKind k)
    : grid(g), values(std::move(v)), kind(k) {
  if (values.size() != grid.size()) {
    throw ValidationError("spectrum: expected one matrix per grid point");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].allFinite()) {
      throw NumericalError("spectrum: non-finite entry", grid.frequency(i));
    }
    if (values[i].rows() != values.front().rows() || values[i].cols() != values.front().cols()) {
      throw ValidationError("spectrum: matrix size changes across the grid");
    }
  }
}

double max_relative_difference(const MatrixSpectrum& a, const MatrixSpectrum& b) {
  if (a.size() != b.size()) throw ValidationError("spectrum: grids differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, relative_difference(a.values[k], b.values[k]));
  }
  return worst;
}

double max_abs_entry(const MatrixSpectrum& s) {
  double worst = 0.0;
  for (const auto& m : s.values) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace mtlnet
