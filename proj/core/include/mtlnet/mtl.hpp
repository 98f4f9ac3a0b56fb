#pragma once

#include <vector>

#include "mtlnet/cable.hpp"
#include "mtlnet/frequency_grid.hpp"
#include "mtlnet/linalg.hpp"

namespace mtlnet {

/// Modal description of a line at one frequency.
///
/// T diagonalizes Y Z (current modal basis): T^{-1} (Y Z) T = Gamma^2, with
/// Z = R + j 2 pi f L and Y = G + j 2 pi f C. Gamma is stored as its diagonal.
struct PropagationParams {
  double frequency = 0.0;
  CVector gamma;  // 1/m, Re >= 0
  CMatrix t;
  CMatrix t_inv;
  CMatrix yc;  // S
  CMatrix zc;  // Ohm

  int conductors() const noexcept { return static_cast<int>(gamma.size()); }
  CMatrix gamma_matrix() const { return gamma.asDiagonal(); }
  /// Diagonal of e^{-Gamma * length}.
  CVector attenuation(double length) const { return (-gamma * length).array().exp(); }
};

/// Modal decomposition at a single frequency, without mode tracking.
/// Throws ValidationError for malformed parameters and DecompositionError when
/// Y Z is defective or Z_C is singular.
PropagationParams propagation_params_at(const CableSpec& cable, double f);

/// Modal decomposition over a grid with eigenvector columns reordered so that
/// each mode stays continuous across frequency.
std::vector<PropagationParams> line_propagation_params(const CableSpec& cable, const FrequencyGrid& grid);

/// max |off-diagonal of T^{-1} (Y Z) T| / ||Y Z||_F for the given decomposition.
double diagonalization_residual(const CableSpec& cable, const PropagationParams& params);

enum class ModalDirection { to_modal, from_modal };

/// to_modal: T^{-1} A T; from_modal: T A T^{-1}.
CMatrix modal_transform(const CMatrix& a, const CMatrix& t, ModalDirection direction);
CMatrix modal_transform(const CMatrix& a, const PropagationParams& params, ModalDirection direction);

/// Load reflection rho_L = Y_C (Y_L + Y_C)^{-1} (Y_L - Y_C) Y_C^{-1}.
CMatrix load_reflection(const CMatrix& y_load, const CMatrix& yc);

/// Input admittance at the start of a line whose far end has modal reflection rho_L^M:
///   Y_in = T (I + rho_B) (I - rho_B)^{-1} T^{-1} Y_C,  rho_B = e^{-Gamma l} rho_L^M e^{-Gamma l}.
CMatrix input_admittance_line(const PropagationParams& params, double length, const CMatrix& rho_load_modal);

/// Input reflection rho_in = Y_R (Y_in + Y_R)^{-1} (Y_in - Y_R) Y_R^{-1}.
CMatrix input_reflection(const CMatrix& y_in, const CMatrix& y_source);

/// (Y_R + Y_C) Y_C^{-1}.
CMatrix source_transform(const PropagationParams& params, const CMatrix& y_source);

/// Modal line mismatch T^{-1} Y_C (Y_C + Y_R)^{-1} (Y_C - Y_R) Y_C^{-1} T.
CMatrix line_mismatch_modal(const PropagationParams& params, const CMatrix& y_source);

enum class ReflectionRoute {
  via_admittance,  // input_admittance_line followed by input_reflection
  modal,           // N T (rho_G + rho_B)(I + rho_G rho_B)^{-1} T^{-1} N^{-1}
};

/// Input reflection of a single terminated line seen from a source with admittance Y_R.
CMatrix line_input_reflection(const PropagationParams& params, double length, const CMatrix& rho_load_modal,
                              const CMatrix& y_source, ReflectionRoute route);

/// Echo voltage -Y_R^{-1} rho_in Y_R V_source.
CVector echo_voltage(const CMatrix& rho_in, const CMatrix& y_source, const CVector& v_source);

/// Voltage transfer from the start to the end of a single line terminated with
/// (physical frame) reflection rho_L:
///   H = Y_C^{-1} T (I - rho_L^M)(I - e^{-2 Gamma l} rho_L^M)^{-1} e^{-Gamma l} T^{-1} Y_C.
CMatrix ctf_line(const PropagationParams& params, double length, const CMatrix& rho_load);

struct SeriesApproximation {
  CMatrix y_in;
  CMatrix rho_in;
  /// Spectral radius of e^{-Gamma l} rho_L^M e^{-Gamma l}; the series converge when < 1.
  double spectral_radius = 0.0;
  bool converges() const noexcept { return spectral_radius < 1.0; }
};

/// Truncated multiple-reflection expansions of Y_in and rho_in keeping `n_terms`
/// exponential terms beyond the constant one. Verification aid only.
SeriesApproximation series_truncated_responses(const PropagationParams& params, double length,
                                               const CMatrix& rho_load_modal, const CMatrix& y_source,
                                               int n_terms);

}  // namespace mtlnet
