#include "mtlnet/mtl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

// Principal square root with Re >= 0; purely imaginary ties take Im >= 0.
Complex propagation_root(Complex lambda) {
  Complex g = std::sqrt(lambda);
  if (g.real() < 0.0) g = -g;
  if (g.real() == 0.0 && g.imag() < 0.0) g = -g;
  return g;
}

// Unit Euclidean norm, first non-negligible component real and positive.
void normalize_columns(CMatrix& t) {
  for (Eigen::Index j = 0; j < t.cols(); ++j) {
    auto col = t.col(j);
    const double norm = col.norm();
    col /= norm;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = Complex(col(i).real(), 0.0);
        break;
      }
    }
  }
}

// Column permutation of `current` maximizing overlap with `previous`, chosen greedily
// by decreasing |<previous_i, current_j>|.
std::vector<Eigen::Index> track_permutation(const CMatrix& previous, const CMatrix& current) {
  const Eigen::Index n = previous.cols();
  const RMatrix overlap = (previous.adjoint() * current).cwiseAbs();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n), -1);
  std::vector<bool> used_prev(static_cast<std::size_t>(n), false), used_cur(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < n; ++step) {
    double best = -1.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (used_prev[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (used_cur[static_cast<std::size_t>(j)]) continue;
        if (overlap(i, j) > best) {
          best = overlap(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    perm[static_cast<std::size_t>(bi)] = bj;
    used_prev[static_cast<std::size_t>(bi)] = true;
    used_cur[static_cast<std::size_t>(bj)] = true;
  }
  return perm;
}

void apply_permutation(PropagationParams& p, const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = p.conductors();
  CMatrix t(n, n), t_inv(n, n);
  CVector gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = perm[static_cast<std::size_t>(i)];
    t.col(i) = p.t.col(src);
    t_inv.row(i) = p.t_inv.row(src);
    gamma(i) = p.gamma(src);
  }
  p.t = std::move(t);
  p.t_inv = std::move(t_inv);
  p.gamma = std::move(gamma);
}

CMatrix series_impedance(const PulParameters& p, double f) {
  const double w = 2.0 * std::numbers::pi * f;
  return p.r.cast<Complex>() + Complex(0.0, w) * p.l.cast<Complex>();
}

CMatrix shunt_admittance(const PulParameters& p, double f) {
  const double w = 2.0 * std::numbers::pi * f;
  return p.g.cast<Complex>() + Complex(0.0, w) * p.c.cast<Complex>();
}

CMatrix sandwich(const CVector& e, const CMatrix& m) {
  // diag(e) m diag(e)
  return e.asDiagonal() * m * e.asDiagonal();
}

}  // namespace

PropagationParams propagation_params_at(const CableSpec& cable, double f) {
  const PulParameters pul = cable.evaluate(f);
  validate_pul_parameters(pul, "cable '" + cable.label() + "' at f = " + std::to_string(f) + " Hz");
  const CMatrix z = series_impedance(pul, f);
  const CMatrix y = shunt_admittance(pul, f);
  const CMatrix yz = y * z;
  const Eigen::Index n = yz.rows();

  PropagationParams p;
  p.frequency = f;
  if (n == 1) {
    p.gamma = CVector::Constant(1, propagation_root(yz(0, 0)));
    p.t = CMatrix::Identity(1, 1);
    p.t_inv = CMatrix::Identity(1, 1);
  } else {
    Eigen::ComplexEigenSolver<CMatrix> solver(yz, true);
    if (solver.info() != Eigen::Success) throw DecompositionError("eigendecomposition of YZ failed", f);
    p.t = solver.eigenvectors();
    normalize_columns(p.t);
    p.gamma = solver.eigenvalues().unaryExpr([](Complex l) { return propagation_root(l); });
    Eigen::PartialPivLU<CMatrix> lu(p.t);
    if (!(lu.rcond() > 1e-12)) throw DecompositionError("YZ is defective (modal matrix T singular)", f);
    p.t_inv = lu.inverse();
  }
  if ((p.gamma.array().abs() == 0.0).any()) throw DecompositionError("zero propagation constant", f);

  const CMatrix gamma_inv = p.gamma.cwiseInverse().asDiagonal();
  p.zc = z * p.t * gamma_inv * p.t_inv;
  Eigen::PartialPivLU<CMatrix> zc_lu(p.zc);
  if (!(zc_lu.rcond() > kSingularRcond)) throw DecompositionError("characteristic impedance is singular", f);
  p.yc = zc_lu.inverse();
  return p;
}

std::vector<PropagationParams> line_propagation_params(const CableSpec& cable, const FrequencyGrid& grid) {
  std::vector<PropagationParams> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = propagation_params_at(cable, grid.frequency(k));
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].conductors() > 1) apply_permutation(out[k], track_permutation(out[k - 1].t, out[k].t));
  }
  return out;
}

double diagonalization_residual(const CableSpec& cable, const PropagationParams& params) {
  const PulParameters pul = cable.evaluate(params.frequency);
  const CMatrix yz = shunt_admittance(pul, params.frequency) * series_impedance(pul, params.frequency);
  CMatrix modal = params.t_inv * yz * params.t;
  modal.diagonal().setZero();
  return modal.cwiseAbs().maxCoeff() / yz.norm();
}

CMatrix modal_transform(const CMatrix& a, const CMatrix& t, ModalDirection direction) {
  if (direction == ModalDirection::to_modal) return solve_left(t, a * t, "modal matrix T");
  return solve_right(t * a, t, "modal matrix T");
}

CMatrix modal_transform(const CMatrix& a, const PropagationParams& params, ModalDirection direction) {
  if (direction == ModalDirection::to_modal) return params.t_inv * a * params.t;
  return params.t * a * params.t_inv;
}

CMatrix load_reflection(const CMatrix& y_load, const CMatrix& yc) {
  const CMatrix sum = y_load + yc;
  const CMatrix ratio = solve_left(sum, y_load - yc, "matched-degenerate Y_L + Y_C");
  return solve_right(yc * ratio, yc, "characteristic admittance Y_C");
}

CMatrix input_admittance_line(const PropagationParams& params, double length, const CMatrix& rho_load_modal) {
  if (length < 0.0) throw RangeError("input_admittance_line: negative length");
  const Eigen::Index n = params.conductors();
  const CMatrix identity = CMatrix::Identity(n, n);
  const CMatrix rho_b = sandwich(params.attenuation(length), rho_load_modal);
  CMatrix core;
  try {
    core = solve_right(identity + rho_b, identity - rho_b, "resonance: I - rho_B",
                       1.0 + rho_b.cwiseAbs().colwise().sum().maxCoeff());
  } catch (const SingularityError& e) {
    throw SingularityError(e.what(), params.frequency);
  }
  return params.t * core * params.t_inv * params.yc;
}

CMatrix input_reflection(const CMatrix& y_in, const CMatrix& y_source) {
  const CMatrix ratio = solve_left(y_in + y_source, y_in - y_source, "Y_in + Y_R");
  return solve_right(y_source * ratio, y_source, "source admittance Y_R");
}

CMatrix source_transform(const PropagationParams& params, const CMatrix& y_source) {
  return (y_source + params.yc) * params.zc;
}

CMatrix line_mismatch_modal(const PropagationParams& params, const CMatrix& y_source) {
  const CMatrix ratio = solve_left(params.yc + y_source, params.yc - y_source, "Y_C + Y_R");
  return params.t_inv * params.yc * ratio * params.zc * params.t;
}

CMatrix line_input_reflection(const PropagationParams& params, double length, const CMatrix& rho_load_modal,
                              const CMatrix& y_source, ReflectionRoute route) {
  if (route == ReflectionRoute::via_admittance) {
    return input_reflection(input_admittance_line(params, length, rho_load_modal), y_source);
  }
  if (length < 0.0) throw RangeError("line_input_reflection: negative length");
  const Eigen::Index n = params.conductors();
  const CMatrix identity = CMatrix::Identity(n, n);
  const CMatrix rho_b = sandwich(params.attenuation(length), rho_load_modal);
  const CMatrix rho_g = line_mismatch_modal(params, y_source);
  const CMatrix nt = source_transform(params, y_source) * params.t;
  CMatrix core;
  try {
    core = solve_right(rho_g + rho_b, identity + rho_g * rho_b, "I + rho_G rho_B");
  } catch (const SingularityError& e) {
    throw SingularityError(e.what(), params.frequency);
  }
  return solve_right(nt * core, nt, "N T");
}

CVector echo_voltage(const CMatrix& rho_in, const CMatrix& y_source, const CVector& v_source) {
  return -solve_left(y_source, rho_in * (y_source * v_source), "source admittance Y_R");
}

CMatrix ctf_line(const PropagationParams& params, double length, const CMatrix& rho_load) {
  if (length < 0.0) throw RangeError("ctf_line: negative length");
  const Eigen::Index n = params.conductors();
  const CMatrix identity = CMatrix::Identity(n, n);
  const CMatrix rho_m = params.t_inv * rho_load * params.t;
  const CVector e1 = params.attenuation(length);
  const CVector e2 = e1.cwiseProduct(e1);
  const CMatrix denom = identity - e2.asDiagonal() * rho_m;
  CMatrix core;
  try {
    core = solve_right(identity - rho_m, denom, "resonance: I - e^{-2 Gamma l} rho_L",
                       1.0 + (denom - identity).cwiseAbs().colwise().sum().maxCoeff());
  } catch (const SingularityError& e) {
    throw SingularityError(e.what(), params.frequency);
  }
  return params.zc * params.t * core * e1.asDiagonal() * params.t_inv * params.yc;
}

SeriesApproximation series_truncated_responses(const PropagationParams& params, double length,
                                               const CMatrix& rho_load_modal, const CMatrix& y_source,
                                               int n_terms) {
  if (n_terms < 0) throw RangeError("series_truncated_responses: n_terms must be >= 0");
  const Eigen::Index n = params.conductors();
  const CMatrix identity = CMatrix::Identity(n, n);
  const CMatrix rho_b = sandwich(params.attenuation(length), rho_load_modal);
  const CMatrix rho_g = line_mismatch_modal(params, y_source);

  SeriesApproximation out;
  out.spectral_radius = spectral_radius(rho_b);

  CMatrix y_sum = identity;
  CMatrix power = identity;
  for (int k = 1; k <= n_terms; ++k) {
    power = power * rho_b;
    y_sum += 2.0 * power;
  }
  out.y_in = params.t * y_sum * params.t_inv * params.yc;

  const CMatrix step = -(rho_g * rho_b);
  CMatrix alt_sum = CMatrix::Zero(n, n);
  CMatrix alt_power = identity;
  for (int k = 0; k < n_terms; ++k) {
    alt_sum += alt_power;
    alt_power = alt_power * step;
  }
  const CMatrix modal = rho_g + (identity - rho_g * rho_g) * rho_b * alt_sum;
  const CMatrix nt = source_transform(params, y_source) * params.t;
  out.rho_in = solve_right(nt * modal, nt, "N T");
  return out;
}

}  // namespace mtlnet
