#pragma once

#include "equilibrium.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace tlab {

// Admissible state near rest: frames perturbed by `spread`, moderate torsion
// and momentum.
inline PointState random_state(std::mt19937_64& rng, double spread = 0.1) {
  std::normal_distribution<double> n(0.0, 1.0);
  PointState s;
  do {
    s = PointState{};
    for (int i = 0; i < 3; ++i) s.M(i) = 100.0 * n(rng);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        s.A(r, c) += spread * n(rng);
        s.P(r, c) += spread * n(rng);
        s.B(r, c) = 0.1 * n(rng);
        s.D(r, c) = 1e-3 * n(rng);
      }
  } while (s.A.determinant() <= 0.2 || s.P.determinant() <= 0.2);
  return s;
}

inline double rel_block_error(const Mat3& a, const Mat3& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  int states = 1000;
  int convexitySamples = 50;
  double convexityMargin = 0.01;
};

// Worst block error between closed-form and difference-gradient forces.
inline CheckResult check_gradient_consistency(const Model& m, std::mt19937_64& rng, int states) {
  double worst = 0.0;
  for (int t = 0; t < states; ++t) {
    const PointState s = random_state(rng);
    const ThermoForces a = m.forces(s, ForceMode::closed_form);
    const ThermoForces b = m.forces(s, ForceMode::gradient);
    worst = std::max({worst, rel_block_error(b.Pi, a.Pi), rel_block_error(b.piMicro, a.piMicro),
                      rel_block_error(b.H, a.H), rel_block_error(b.Evec, a.Evec)});
  }
  return {"gradient_consistency", worst, 1e-6, worst <= 1e-6, fmt::format("{} random states", states)};
}

inline CheckResult check_source_cancellation(const Model& m, std::mt19937_64& rng, int states) {
  double worst = 0.0;
  for (int t = 0; t < states; ++t) worst = std::max(worst, m.source_cancellation(random_state(rng, 0.3)).relative());
  return {"source_cancellation", worst, 1e-12, worst <= 1e-12, fmt::format("{} random states", states)};
}

inline CheckResult check_momentum_flux_symmetry(const Model& m, std::mt19937_64& rng, int states) {
  double worst = 0.0;
  for (int t = 0; t < states; ++t) {
    const Mat3 T = m.stress(random_state(rng)).momentumFlux;
    worst = std::max(worst, (T - T.transpose()).norm() / T.norm());
  }
  return {"momentum_flux_symmetry", worst, 1e-10, worst <= 1e-10, fmt::format("{} random states", states)};
}

// The configured parameters must satisfy the closed-form conditions, and the
// energy Hessian must agree.
inline CheckResult check_convexity(const MaterialParams& p) {
  const ConvexityReport c = convexity_closed_form(p);
  const HessianReport h = hessian_check(p, BaselineMode::raw);
  std::string failed;
  for (const auto& cond : c.conditions)
    if (!cond.satisfied) failed += (failed.empty() ? "" : ", ") + cond.name;
  const bool agree = c.satisfied == h.positiveDefinite();
  CheckResult r{"convexity", h.minEigenvalue, 0.0, c.satisfied && agree, ""};
  r.detail = c.satisfied ? "closed-form conditions hold" : "violated: " + failed;
  if (!agree) r.detail += "; Hessian disagrees";
  return r;
}

// Parameter sample around the convexity boundaries, keeping only points whose
// margins all exceed `margin`.
inline std::vector<MaterialParams> convexity_sample(std::mt19937_64& rng, int count, double margin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MaterialParams> out;
  while (static_cast<int>(out.size()) < count) {
    MaterialParams p;
    p.c0 = 50.0 + 100.0 * u(rng);
    p.cs = p.c0 / std::sqrt(6.0) * (0.6 + 1.0 * u(rng));
    p.C0 = p.c0 / std::sqrt(15.0) * (0.6 + 3.0 * u(rng));
    p.Cs = 0.5 * std::sqrt(p.c0 * p.c0 / 3.0 + p.C0 * p.C0) * (0.6 + 1.0 * u(rng));
    if (convexity_closed_form(p).min_abs_margin() > margin) out.push_back(p);
  }
  return out;
}

inline CheckResult check_convexity_agreement(std::mt19937_64& rng, int samples, double margin) {
  int agree = 0, convex = 0;
  for (const MaterialParams& p : convexity_sample(rng, samples, margin)) {
    const HessianReport h = hessian_check(p, BaselineMode::raw);
    agree += h.closedFormSatisfied == h.positiveDefinite();
    convex += h.closedFormSatisfied;
  }
  const double mismatch = samples - agree;
  return {"convexity_agreement", mismatch, 0.0, mismatch == 0.0,
          fmt::format("{}/{} verdicts agree ({} convex), margins > {}%", agree, samples, convex, 100.0 * margin)};
}

// The identity suite; every check draws from its own seeded stream so the
// residuals do not depend on which checks run.
inline std::vector<CheckResult> run_identity_checks(const MaterialParams& p, BaselineMode mode,
                                                    const CheckOptions& opt = {}) {
  p.validate();
  const Model m(p, mode);
  auto stream = [&](std::uint64_t k) { return std::mt19937_64(opt.seed * 1000003ULL + k); };
  std::vector<CheckResult> out;
  auto r1 = stream(1), r2 = stream(2), r3 = stream(3), r4 = stream(4);
  out.push_back(check_gradient_consistency(m, r1, opt.states));
  out.push_back(check_source_cancellation(m, r2, opt.states));
  out.push_back(check_momentum_flux_symmetry(m, r3, opt.states));
  out.push_back(check_convexity(p));
  out.push_back(check_convexity_agreement(r4, opt.convexitySamples, opt.convexityMargin));
  return out;
}

}  // namespace tlab
