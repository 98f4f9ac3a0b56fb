#include "mtlnet/admittance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

struct TermConductors {
  int operator()(const ConstantAdmittance& t) const { return static_cast<int>(t.value.rows()); }
  int operator()(const ParallelRC& t) const { return static_cast<int>(t.resistance.size()); }
  int operator()(const TabulatedAdmittance& t) const {
    return t.values.empty() ? 0 : static_cast<int>(t.values.front().rows());
  }
};

struct TermEvaluator {
  double f;

  CMatrix operator()(const ConstantAdmittance& t) const { return t.value; }

  CMatrix operator()(const ParallelRC& t) const {
    const auto n = static_cast<Eigen::Index>(t.resistance.size());
    CMatrix y = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = t.resistance[static_cast<std::size_t>(i)];
      const double g = (r > 0.0 && std::isfinite(r)) ? 1.0 / r : 0.0;
      y(i, i) = Complex(g, 2.0 * std::numbers::pi * f * t.capacitance[static_cast<std::size_t>(i)]);
    }
    return y;
  }

  CMatrix operator()(const TabulatedAdmittance& t) const {
    const auto& fs = t.frequencies;
    if (f <= fs.front()) return t.values.front();
    if (f >= fs.back()) return t.values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(fs.begin(), fs.end(), f) - fs.begin());
    const std::size_t lo = hi - 1;
    const double w = (f - fs[lo]) / (fs[hi] - fs[lo]);
    return (1.0 - w) * t.values[lo] + w * t.values[hi];
  }
};

void validate_term(const AdmittanceModel::Term& term) {
  if (const auto* c = std::get_if<ConstantAdmittance>(&term)) {
    if (c->value.rows() != c->value.cols() || c->value.rows() == 0 || !c->value.allFinite()) {
      throw ValidationError("admittance: constant value must be a finite square matrix");
    }
  } else if (const auto* rc = std::get_if<ParallelRC>(&term)) {
    if (rc->resistance.empty() || rc->resistance.size() != rc->capacitance.size()) {
      throw ValidationError("admittance: parallel RC needs one R and one C per conductor");
    }
    for (double c : rc->capacitance) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("admittance: capacitance must be >= 0");
    }
  } else if (const auto* tab = std::get_if<TabulatedAdmittance>(&term)) {
    if (tab->frequencies.empty() || tab->frequencies.size() != tab->values.size()) {
      throw ValidationError("admittance: table frequencies and values differ in length");
    }
    if (!std::is_sorted(tab->frequencies.begin(), tab->frequencies.end()) ||
        std::adjacent_find(tab->frequencies.begin(), tab->frequencies.end()) != tab->frequencies.end()) {
      throw ValidationError("admittance: table frequencies must be strictly increasing");
    }
    const auto n = tab->values.front().rows();
    for (const auto& v : tab->values) {
      if (v.rows() != n || v.cols() != n || n == 0 || !v.allFinite()) {
        throw ValidationError("admittance: table entries must be finite square matrices of equal size");
      }
    }
  }
}

}  // namespace

AdmittanceModel::AdmittanceModel(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    validate_term(term);
    const int n = std::visit(TermConductors{}, term);
    if (conductors_ != 0 && n != conductors_) {
      throw ValidationError("admittance: terms disagree on conductor count");
    }
    conductors_ = n;
  }
}

AdmittanceModel AdmittanceModel::conductance(double g, int conductors) {
  return constant(CMatrix::Identity(conductors, conductors) * Complex(g, 0.0));
}

CMatrix AdmittanceModel::evaluate(double f, int conductors) const {
  if (conductors_ != 0 && conductors_ != conductors) {
    throw ValidationError("admittance: model has " + std::to_string(conductors_) +
                          " conductors, system has " + std::to_string(conductors));
  }
  CMatrix y = CMatrix::Zero(conductors, conductors);
  for (const auto& term : terms_) y += std::visit(TermEvaluator{f}, term);
  return y;
}

AdmittanceModel AdmittanceModel::operator+(const AdmittanceModel& other) const {
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return AdmittanceModel(std::move(all));
}

bool is_passive(const AdmittanceModel& model, const FrequencyGrid& grid, int conductors) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const CMatrix y = model.evaluate(grid.frequency(k), conductors);
    Eigen::ComplexEigenSolver<CMatrix> solver(y, false);
    const double scale = std::max(y.norm(), 1e-300);
    if ((solver.eigenvalues().real().array() < -1e-12 * scale).any()) return false;
  }
  return true;
}

}  // namespace mtlnet
