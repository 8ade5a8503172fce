#pragma once

#include "model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace tlab {

inline PointState equilibrium_state(const MaterialParams& p) {
  p.validate();
  return PointState{};
}

struct BaselineReport {
  Mat3 Pi = Mat3::Zero();
  Mat3 piMicro = Mat3::Zero();
  Vec39 sources = Vec39::Zero();
  bool nonzero = false;
};

// Forces and sources left at the reference state; nonzero only in raw mode.
inline BaselineReport baseline_report(const Model& m) {
  const PointState eq = equilibrium_state(m.params());
  BaselineReport r;
  const ThermoForces f = m.forces(eq);
  r.Pi = f.Pi;
  r.piMicro = f.piMicro;
  r.sources = m.sources(f);
  r.nonzero = r.Pi.cwiseAbs().maxCoeff() > 0.0 || r.piMicro.cwiseAbs().maxCoeff() > 0.0;
  return r;
}

struct ConvexityCondition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // (lhs - rhs)/|rhs|, or +-1 for plain positivity
  bool satisfied = false;
};

struct ConvexityReport {
  std::vector<ConvexityCondition> conditions;
  bool satisfied = false;
  double min_abs_margin() const {
    double m = INFINITY;
    for (const auto& c : conditions) m = std::min(m, std::abs(c.margin));
    return m;
  }
};

inline ConvexityReport convexity_closed_form(const MaterialParams& p) {
  ConvexityReport r;
  auto positive = [&](const char* name, double v) {
    r.conditions.push_back({name, v, 0.0, v > 0.0 ? 1.0 : -1.0, v > 0.0});
  };
  auto bound = [&](const char* name, double lhs, double rhs) {
    r.conditions.push_back({name, lhs, rhs, (lhs - rhs) / std::abs(rhs), lhs > rhs});
  };
  positive("rho0 > 0", p.rho0);
  positive("mu > 0", p.mu);
  positive("epsilon > 0", p.epsilon);
  positive("c0 > 0", p.c0);
  bound("cs > c0/sqrt(6)", p.cs, p.c0 / std::sqrt(6.0));
  bound("C0 > c0/sqrt(15)", p.C0, p.c0 / std::sqrt(15.0));
  bound("Cs > sqrt(c0^2/3 + C0^2)/2", p.Cs, 0.5 * std::sqrt(p.c0 * p.c0 / 3.0 + p.C0 * p.C0));
  r.satisfied = true;
  for (const auto& c : r.conditions) r.satisfied = r.satisfied && c.satisfied;
  return r;
}

struct HessianReport {
  std::vector<double> eigenvalues;        // all 39, ascending, in energy units
  std::vector<double> scaledEigenvalues;  // Jacobi-scaled spectrum (same inertia), ascending
  int trivialZeros = 0;                   // frame-rotation null directions
  double minEigenvalue = 0.0;             // smallest scaled eigenvalue off the trivial null space
  double asymmetry = 0.0;                 // |J - J^T| / |J| of the difference Jacobian
  bool closedFormSatisfied = false;
  bool positiveDefinite() const { return minEigenvalue > 0.0; }
};

// Hessian of the energy at rest as the central-difference Jacobian of the
// closed-form gradient.
inline Mat39 energy_hessian(const Model& m, double* asymmetry = nullptr) {
  const Vec39 q0 = equilibrium_state(m.params()).pack();
  Mat39 J;
  for (int n = 0; n < kNumFields; ++n) {
    const double h = 1e-4 * std::max(1.0, std::abs(q0[n]));
    Vec39 qp = q0, qm = q0;
    qp[n] += h;
    qm[n] -= h;
    J.col(n) = (m.energy_gradient(PointState::unpack(qp)) - m.energy_gradient(PointState::unpack(qm))) /
               (qp[n] - qm[n]);
  }
  if (asymmetry) *asymmetry = (J - J.transpose()).norm() / J.norm();
  return 0.5 * (J + J.transpose());
}

inline HessianReport hessian_check(const MaterialParams& p, BaselineMode mode) {
  const Model m(p, mode);
  HessianReport r;
  const Mat39 H = energy_hessian(m, &r.asymmetry);
  Eigen::SelfAdjointEigenSolver<Mat39> es(H, Eigen::EigenvaluesOnly);
  for (int i = 0; i < kNumFields; ++i) r.eigenvalues.push_back(es.eigenvalues()[i]);

  // The diagonal spans ten decades; congruence scaling keeps the inertia while
  // making the zero test meaningful.
  Vec39 d;
  for (int i = 0; i < kNumFields; ++i) d[i] = H(i, i) != 0.0 ? 1.0 / std::sqrt(std::abs(H(i, i))) : 1.0;
  const Mat39 Hs = d.asDiagonal() * H * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat39> ss(Hs, Eigen::EigenvaluesOnly);
  const double scale = ss.eigenvalues().cwiseAbs().maxCoeff();
  r.minEigenvalue = INFINITY;
  for (int i = 0; i < kNumFields; ++i) {
    const double l = ss.eigenvalues()[i];
    r.scaledEigenvalues.push_back(l);
    if (std::abs(l) <= 1e-7 * scale)
      ++r.trivialZeros;
    else
      r.minEigenvalue = std::min(r.minEigenvalue, l);
  }
  r.closedFormSatisfied = convexity_closed_form(p).satisfied;
  return r;
}

}  // namespace tlab
