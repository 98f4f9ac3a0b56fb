#include "mtlnet/cable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mtlnet/error.hpp"

namespace mtlnet {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

bool is_symmetric(const RMatrix& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * scale;
}

bool is_positive_definite(const RMatrix& m) {
  Eigen::LLT<RMatrix> llt(m);
  return llt.info() == Eigen::Success;
}

RMatrix coupled(int n, double diag, double coupling) {
  RMatrix m = RMatrix::Constant(n, n, diag * coupling);
  m.diagonal().setConstant(diag);
  return m;
}

struct ModelConductors {
  int operator()(const CoupledCableModel& m) const { return m.conductors; }
  int operator()(const ConstantCableModel& m) const { return static_cast<int>(m.l.rows()); }
  int operator()(const TabulatedCableModel& m) const {
    return m.values.empty() ? 0 : static_cast<int>(m.values.front().l.rows());
  }
};

struct ModelEvaluator {
  double f;

  PulParameters operator()(const CoupledCableModel& m) const {
    const int n = m.conductors;
    PulParameters p;
    p.r = RMatrix::Identity(n, n) * (m.r0 * std::sqrt(f / m.skin_reference));
    p.l = coupled(n, m.l, m.coupling_l);
    p.c = coupled(n, m.c, m.coupling_c);
    p.g = 2.0 * std::numbers::pi * f * m.loss_tangent * p.c;
    return p;
  }

  PulParameters operator()(const ConstantCableModel& m) const { return {m.r, m.l, m.g, m.c}; }

  PulParameters operator()(const TabulatedCableModel& m) const {
    const auto& fs = m.frequencies;
    if (f <= fs.front()) return m.values.front();
    if (f >= fs.back()) return m.values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(fs.begin(), fs.end(), f) - fs.begin());
    const std::size_t lo = hi - 1;
    const double w = (f - fs[lo]) / (fs[hi] - fs[lo]);
    const auto& a = m.values[lo];
    const auto& b = m.values[hi];
    return {(1 - w) * a.r + w * b.r, (1 - w) * a.l + w * b.l, (1 - w) * a.g + w * b.g,
            (1 - w) * a.c + w * b.c};
  }
};

void check_shapes(const PulParameters& p, int n, const std::string& context) {
  for (const RMatrix* m : {&p.r, &p.l, &p.g, &p.c}) {
    if (m->rows() != n || m->cols() != n) {
      throw ValidationError(context + ": parameter matrices must be " + std::to_string(n) + "x" +
                            std::to_string(n));
    }
  }
}

}  // namespace

void validate_pul_parameters(const PulParameters& p, const std::string& context) {
  const auto n = static_cast<int>(p.l.rows());
  if (n < 1) throw ValidationError(context + ": at least one conductor required");
  check_shapes(p, n, context);
  for (const auto& [name, m] : {std::pair{"R", &p.r}, {"L", &p.l}, {"G", &p.g}, {"C", &p.c}}) {
    if (!m->allFinite()) throw ValidationError(context + ": " + name + " has non-finite entries");
    if (!is_symmetric(*m)) throw ValidationError(context + ": " + name + " is not symmetric");
  }
  if ((p.r.diagonal().array() <= 0.0).any() && (p.r.diagonal().array() != 0.0).any()) {
    // R may vanish entirely (lossless line); otherwise its diagonal must be positive.
    throw ValidationError(context + ": R diagonal must be positive");
  }
  if ((p.l.diagonal().array() <= 0.0).any()) throw ValidationError(context + ": L diagonal must be positive");
  if ((p.c.diagonal().array() <= 0.0).any()) throw ValidationError(context + ": C diagonal must be positive");
  if (!is_positive_definite(p.l)) throw ValidationError(context + ": L is not positive definite");
  if (!is_positive_definite(p.c)) throw ValidationError(context + ": C is not positive definite");
}

CableSpec::CableSpec(std::string label, Model model) : label_(std::move(label)), model_(std::move(model)) {
  conductors_ = std::visit(ModelConductors{}, model_);
  if (conductors_ < 1) throw ValidationError("cable '" + label_ + "': at least one conductor required");
  if (const auto* tab = std::get_if<TabulatedCableModel>(&model_)) {
    if (tab->frequencies.empty() || tab->frequencies.size() != tab->values.size()) {
      throw ValidationError("cable '" + label_ + "': table frequencies and values differ in length");
    }
    if (!std::is_sorted(tab->frequencies.begin(), tab->frequencies.end()) ||
        std::adjacent_find(tab->frequencies.begin(), tab->frequencies.end()) != tab->frequencies.end()) {
      throw ValidationError("cable '" + label_ + "': table frequencies must be strictly increasing");
    }
    for (std::size_t i = 0; i < tab->values.size(); ++i) {
      validate_pul_parameters(tab->values[i], "cable '" + label_ + "' table row " + std::to_string(i));
    }
  }
  if (const auto* cst = std::get_if<ConstantCableModel>(&model_)) {
    validate_pul_parameters({cst->r, cst->l, cst->g, cst->c}, "cable '" + label_ + "'");
  }
  if (const auto* cpl = std::get_if<CoupledCableModel>(&model_)) {
    if (!(cpl->l > 0.0) || !(cpl->c > 0.0) || cpl->r0 < 0.0 || cpl->loss_tangent < 0.0 ||
        !(cpl->skin_reference > 0.0)) {
      throw ValidationError("cable '" + label_ + "': invalid coupled cable parameters");
    }
    validate_pul_parameters(evaluate(cpl->skin_reference), "cable '" + label_ + "'");
  }
}

PulParameters CableSpec::evaluate(double f) const {
  PulParameters p = std::visit(ModelEvaluator{f}, model_);
  check_shapes(p, conductors_, "cable '" + label_ + "'");
  return p;
}

CableSpec CableSpec::default_cable(int conductors) {
  CoupledCableModel m;
  m.conductors = conductors;
  return CableSpec("default" + std::to_string(conductors), m);
}

std::vector<double> modal_velocities(const CableSpec& cable, double f) {
  const PulParameters p = cable.evaluate(f);
  Eigen::EigenSolver<RMatrix> solver(p.l * p.c, false);
  std::vector<double> v;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    v.push_back(1.0 / std::sqrt(solver.eigenvalues()[i].real()));
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace mtlnet
