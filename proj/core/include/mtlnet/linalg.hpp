#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace mtlnet {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

/// Reciprocal condition number below which a factor is treated as singular.
inline constexpr double kSingularRcond = 1e-13;

/// Returns A^{-1} B. Throws SingularityError naming `what` when A is singular. A positive
/// `reference_norm` also rejects A whose smallest singular scale, 1 / ||A^{-1}||, falls below
/// kSingularRcond * reference_norm (needed when A is a small difference of large terms).
CMatrix solve_left(const CMatrix& a, const CMatrix& b, std::string_view what, double reference_norm = 0.0);

/// Returns X A^{-1}, with the same singularity checks as solve_left.
CMatrix solve_right(const CMatrix& x, const CMatrix& a, std::string_view what, double reference_norm = 0.0);

CMatrix inverse(const CMatrix& a, std::string_view what);

/// ||a - b||_F / ||b||_F, falling back to the absolute difference when b vanishes.
double relative_difference(const CMatrix& a, const CMatrix& b);

/// ||m||_F / sqrt(rows): |m| for scalars, 1 for the identity.
double normalized_magnitude(const CMatrix& m);

/// Largest |eigenvalue| of a square matrix.
double spectral_radius(const CMatrix& m);

bool all_finite(const CMatrix& m);

}  // namespace mtlnet
