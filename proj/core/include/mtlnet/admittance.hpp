#pragma once

#include <variant>
#include <vector>

#include "mtlnet/frequency_grid.hpp"
#include "mtlnet/linalg.hpp"

namespace mtlnet {

/// Frequency-independent L x L admittance (S).
struct ConstantAdmittance {
  CMatrix value;
};

/// Per-conductor shunt resistor in parallel with a capacitor: y_i = 1/R_i + j 2 pi f C_i.
/// A non-positive or infinite resistance means "no resistor".
struct ParallelRC {
  std::vector<double> resistance;   // Ohm
  std::vector<double> capacitance;  // F
};

/// Tabulated L x L admittance, linearly interpolated, held constant outside the table.
struct TabulatedAdmittance {
  std::vector<double> frequencies;
  std::vector<CMatrix> values;
};

/// Admittance spectrum evaluator: the sum (parallel connection) of its terms.
/// An empty model is an open circuit.
class AdmittanceModel {
 public:
  using Term = std::variant<ConstantAdmittance, ParallelRC, TabulatedAdmittance>;

  AdmittanceModel() = default;
  /// Throws ValidationError for inconsistent term shapes.
  explicit AdmittanceModel(std::vector<Term> terms);

  static AdmittanceModel constant(const CMatrix& y) { return AdmittanceModel({ConstantAdmittance{y}}); }
  /// g * I for an `conductors`-conductor system.
  static AdmittanceModel conductance(double g, int conductors);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  /// Conductor count implied by the terms, 0 for an empty model.
  int conductors() const noexcept { return conductors_; }

  /// Evaluates the admittance at frequency f for an `conductors`-conductor system.
  CMatrix evaluate(double f, int conductors) const;

  /// Parallel connection of two models.
  AdmittanceModel operator+(const AdmittanceModel& other) const;

 private:
  std::vector<Term> terms_;
  int conductors_ = 0;
};

/// True when every eigenvalue of Y(f) has a non-negative real part on the whole grid.
bool is_passive(const AdmittanceModel& model, const FrequencyGrid& grid, int conductors);

}  // namespace mtlnet
