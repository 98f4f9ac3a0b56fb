#include "mtlnet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

Eigen::PartialPivLU<CMatrix> checked_lu(const CMatrix& a, std::string_view what, double reference_norm = 0.0) {
  if (a.rows() != a.cols()) {
    throw ValidationError(std::string(what) + ": matrix is not square");
  }
  Eigen::PartialPivLU<CMatrix> lu(a);
  double rcond = lu.rcond();
  if (reference_norm > 0.0) rcond = std::min(rcond, rcond * a.cwiseAbs().colwise().sum().maxCoeff() / reference_norm);
  if (!(rcond > kSingularRcond)) {
    throw SingularityError(std::string(what) + " is singular (rcond " + std::to_string(rcond) + ")");
  }
  return lu;
}

}  // namespace

CMatrix solve_left(const CMatrix& a, const CMatrix& b, std::string_view what, double reference_norm) {
  return checked_lu(a, what, reference_norm).solve(b);
}

CMatrix solve_right(const CMatrix& x, const CMatrix& a, std::string_view what, double reference_norm) {
  // X A^{-1} = (A^{-T} X^T)^T
  const CMatrix at = a.transpose();
  return checked_lu(at, what, reference_norm).solve(x.transpose()).transpose();
}

CMatrix inverse(const CMatrix& a, std::string_view what) { return checked_lu(a, what).inverse(); }

double relative_difference(const CMatrix& a, const CMatrix& b) {
  const double scale = b.norm();
  const double diff = (a - b).norm();
  return scale > 0.0 ? diff / scale : diff;
}

double normalized_magnitude(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.norm() / std::sqrt(static_cast<double>(m.rows()));
}

double spectral_radius(const CMatrix& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace mtlnet
