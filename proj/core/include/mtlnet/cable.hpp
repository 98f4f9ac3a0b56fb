#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mtlnet/linalg.hpp"

namespace mtlnet {

/// Per-unit-length parameter matrices of an L-conductor cable at one frequency.
struct PulParameters {
  RMatrix r;  // Ohm/m
  RMatrix l;  // H/m
  RMatrix g;  // S/m
  RMatrix c;  // F/m
};

/// Parametric lossy cable with uniform coupling between conductors:
///   R(f) = r0 * sqrt(f / skin_reference) * I
///   L    = l * (I + coupling_l * J)
///   C    = c * (I + coupling_c * J)
///   G(f) = 2 pi f * loss_tangent * C
/// where J has ones off the diagonal and zeros on it.
struct CoupledCableModel {
  int conductors = 2;
  double r0 = 0.1;
  double skin_reference = 1e6;
  double l = 0.5e-6;
  double c = 100e-12;
  double loss_tangent = 5e-4;
  double coupling_l = 0.3;
  double coupling_c = -0.3;
};

/// Frequency-independent matrices.
struct ConstantCableModel {
  RMatrix r, l, g, c;
};

/// Tabulated parameters, linearly interpolated in frequency and held constant
/// outside the table range.
struct TabulatedCableModel {
  std::vector<double> frequencies;
  std::vector<PulParameters> values;
};

class CableSpec {
 public:
  using Model = std::variant<CoupledCableModel, ConstantCableModel, TabulatedCableModel>;

  /// Throws ValidationError when the model is malformed.
  CableSpec(std::string label, Model model);

  int conductors() const noexcept { return conductors_; }
  const std::string& label() const noexcept { return label_; }
  const Model& model() const noexcept { return model_; }

  /// Evaluates and validates R, L, G, C at frequency f.
  PulParameters evaluate(double f) const;

  /// Lossy default cable (r0 = 0.1 Ohm/m, 0.5 uH/m, 100 pF/m, tan(delta) = 5e-4, coupling 0.3).
  static CableSpec default_cable(int conductors);

 private:
  std::string label_;
  Model model_;
  int conductors_ = 0;
};

/// Checks symmetry, positive diagonals of R, L, C and positive definiteness of L and C.
/// Throws ValidationError mentioning `context`.
void validate_pul_parameters(const PulParameters& p, const std::string& context);

/// Lossless modal propagation velocities 1/sqrt(eig(L C)) at frequency f, sorted descending.
std::vector<double> modal_velocities(const CableSpec& cable, double f);

}  // namespace mtlnet
