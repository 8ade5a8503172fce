#pragma once

#include "dispersion.hpp"
#include "equilibrium.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace tlab {

enum class Boundary { periodic };

struct Grid1D {
  int N = 0;
  double L = 0.0;
  Boundary boundary = Boundary::periodic;

  double dx() const { return L / N; }
  double x(int i) const { return (i + 0.5) * dx(); }

  void validate() const {
    if (N < 16) throw std::invalid_argument(fmt::format("grid needs at least 16 cells (got {})", N));
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid length must be positive");
  }
};

enum class SourceScheme { explicit_split, midpoint_split };
enum class Reconstruction { first_order, muscl_minmod };

inline const char* to_string(SourceScheme s) {
  return s == SourceScheme::explicit_split ? "explicit_split" : "midpoint_split";
}
inline const char* to_string(Reconstruction r) {
  return r == Reconstruction::first_order ? "first_order" : "muscl_minmod";
}
inline SourceScheme parse_source_scheme(const std::string& s) {
  if (s == "explicit_split") return SourceScheme::explicit_split;
  if (s == "midpoint_split") return SourceScheme::midpoint_split;
  throw std::invalid_argument("unknown source scheme '" + s + "'");
}
inline Reconstruction parse_reconstruction(const std::string& s) {
  if (s == "first_order") return Reconstruction::first_order;
  if (s == "muscl_minmod") return Reconstruction::muscl_minmod;
  throw std::invalid_argument("unknown reconstruction '" + s + "'");
}

struct SimConfig {
  double cfl = 0.45;
  double tEnd = 0.0;
  SourceScheme sourceScheme = SourceScheme::midpoint_split;
  Reconstruction reconstruction = Reconstruction::muscl_minmod;
  bool sources = true;

  void validate() const {
    if (!(cfl > 0.0 && cfl < 0.5)) throw std::invalid_argument(fmt::format("cfl must lie in (0, 0.5), got {}", cfl));
    if (!(tEnd >= 0.0) || !std::isfinite(tEnd)) throw std::invalid_argument("tEnd must be finite and non-negative");
  }
};

// Solver stopped on an inadmissible state.
class SimulationAbort : public NumericalError {
 public:
  SimulationAbort(const std::string& what, int cell, double time)
      : NumericalError(fmt::format("{} in cell {} at t = {:.9e} s", what, cell, time)), cell_(cell), time_(time) {}
  int cell() const { return cell_; }
  double time() const { return time_; }

 private:
  int cell_;
  double time_;
};

using Field = std::vector<Vec39>;

// Body force on the momentum equation, evaluated per cell.
using BodyForce = std::function<Vec3(double x, double t)>;

struct EnergyAudit {
  std::vector<double> times;
  std::vector<double> totalEnergy;
  std::vector<Vec3> totalMomentum;
  double drift = 0.0;          // relative change of the total energy at the last time
  double maxDrift = 0.0;       // largest relative change over the run
  double momentumDrift = 0.0;  // largest change of total momentum, relative
};

namespace detail {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Largest deviation of A and P from the identity; used to inflate the rest
// wave speed bound for deformed states.
inline double deformation(const Vec39& q) {
  double d = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      const double id = r == c ? 1.0 : 0.0;
      d = std::max(d, std::abs(q[block::A + 3 * r + c] - id));
      d = std::max(d, std::abs(q[block::P + 3 * r + c] - id));
    }
  return d;
}

}  // namespace detail

class Simulation {
 public:
  Simulation(const Model& model, Grid1D grid, SimConfig cfg, Field initial)
      : model_(model), grid_(grid), cfg_(cfg), q_(std::move(initial)) {
    grid_.validate();
    cfg_.validate();
    if (static_cast<int>(q_.size()) != grid_.N)
      throw std::invalid_argument(fmt::format("initial field has {} cells, grid has {}", q_.size(), grid_.N));
    const LinearSystem ls = linearize(model_);
    Eigen::EigenSolver<Mat39> ec(ls.C, false);
    cRest_ = ec.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::EigenSolver<Mat39> es(ls.S, false);
    omegaSource_ = es.eigenvalues().cwiseAbs().maxCoeff();
    // raw mode: the rest state has nonzero sources, subtract them so the
    // reference state is exactly steady
    restSources_ = model_.sources(PointState{});
    check_admissible(q_);
  }

  const Field& state() const { return q_; }
  const Grid1D& grid() const { return grid_; }
  const SimConfig& config() const { return cfg_; }
  const Model& model() const { return model_; }
  double time() const { return t_; }
  long steps() const { return steps_; }
  double rest_speed() const { return cRest_; }
  void set_body_force(BodyForce f) { force_ = std::move(f); }

  double max_speed(const Field& q) const {
    double a = 0.0;
    for (const Vec39& c : q) a = std::max(a, local_speed(c));
    return a;
  }

  double stable_dt() const { return cfg_.cfl * grid_.dx() / max_speed(q_); }

  void step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    const bool src = cfg_.sources && omegaSource_ > 0.0;
    if (src && cfg_.sourceScheme == SourceScheme::midpoint_split) {
      source_step(q_, 0.5 * dt);
      hyperbolic_step(dt);
      check_admissible(q_);
      source_step(q_, 0.5 * dt);
    } else {
      hyperbolic_step(dt);
      check_admissible(q_);
      if (src) source_step(q_, dt);
    }
    t_ += dt;
    ++steps_;
    check_admissible(q_);
  }

  // Advance to tEnd (or cfg.tEnd); the observer is called after every step.
  void run(double tEnd, const std::function<void(const Simulation&)>& observer = {}) {
    while (t_ < tEnd * (1.0 - 1e-14)) {
      double dt = stable_dt();
      if (t_ + dt > tEnd) dt = tEnd - t_;
      step(dt);
      if (observer) observer(*this);
    }
  }
  void run() { run(cfg_.tEnd); }

  double total_energy() const {
    double e = 0.0;
    for (const Vec39& c : q_) e += model_.total_energy(PointState::unpack(c));
    return e * grid_.dx();
  }

  Vec3 total_momentum() const {
    Vec3 m = Vec3::Zero();
    for (const Vec39& c : q_) m += c.head<3>();
    return m * grid_.dx();
  }

  // Sum of |M| over the domain, the scale for momentum drift.
  double momentum_scale() const {
    double s = 0.0;
    for (const Vec39& c : q_) s += c.head<3>().norm();
    return s * grid_.dx();
  }

 private:
  struct FaceState {
    Vec39 q;
    Vec39 flux;
    Vec3 v;
    double speed;
  };

  double local_speed(const Vec39& c) const {
    const PointState s = PointState::unpack(c);
    const double vx = std::abs(model_.velocity(s)(0));
    return vx + cRest_ * (1.0 + 4.0 * detail::deformation(c));
  }

  FaceState face(const Vec39& q) const {
    const PointState s = PointState::unpack(q);
    const Model::Evaluation ev = model_.evaluate(s);
    return {q, model_.flux_x(s, ev.forces, ev.v, model_.stress(s, ev.forces, ev.v, ev.energy.total)), ev.v,
            std::abs(ev.v(0)) + cRest_ * (1.0 + 4.0 * detail::deformation(q))};
  }

  // Time derivative from the transport terms.
  void hyperbolic_rhs(const Field& q, double t, Field& rhs) const {
    const int N = grid_.N;
    const double dx = grid_.dx();
    auto at = [&](int i) -> const Vec39& { return q[(i % N + N) % N]; };

    std::vector<Vec39> slope(N, Vec39::Zero());
    if (cfg_.reconstruction == Reconstruction::muscl_minmod)
      for (int i = 0; i < N; ++i) {
        const Vec39 l = at(i) - at(i - 1), r = at(i + 1) - at(i);
        for (int n = 0; n < kNumFields; ++n) slope[i][n] = detail::minmod(l[n], r[n]);
      }

    // faces f = i + 1/2 for i = 0..N-1
    std::vector<Vec39> flux(N), qbar(N);
    std::vector<Vec3> vbar(N);
    for (int i = 0; i < N; ++i) {
      const int j = (i + 1) % N;
      const Vec39 qL = q[i] + 0.5 * slope[i];
      const Vec39 qR = q[j] - 0.5 * slope[j];
      check_face(qL, i, t);
      check_face(qR, j, t);
      const FaceState L = face(qL), R = face(qR);
      const double a = std::max(L.speed, R.speed);
      flux[i] = 0.5 * (L.flux + R.flux) - 0.5 * a * (R.q - L.q);
      qbar[i] = 0.5 * (L.q + R.q);
      vbar[i] = 0.5 * (L.v + R.v);
    }

    rhs.resize(N);
    for (int i = 0; i < N; ++i) {
      const int w = (i - 1 + N) % N;
      const PointState s = PointState::unpack(q[i]);
      const Vec3 v = model_.velocity(s);
      const Vec39 nc = Model::nonconservative_x(s, v, qbar[i] - qbar[w], vbar[i] - vbar[w]);
      rhs[i] = -(flux[i] - flux[w] + nc) / dx;
      if (force_) rhs[i].head<3>() += force_(grid_.x(i), t);
    }
  }

  // SSP-RK2
  void hyperbolic_step(double dt) {
    Field k1, k2, q1(q_.size());
    hyperbolic_rhs(q_, t_, k1);
    for (std::size_t i = 0; i < q_.size(); ++i) q1[i] = q_[i] + dt * k1[i];
    check_admissible(q1);
    hyperbolic_rhs(q1, t_ + dt, k2);
    for (std::size_t i = 0; i < q_.size(); ++i) q_[i] = 0.5 * (q_[i] + q1[i] + dt * k2[i]);
  }

  Vec39 balanced_sources(const Vec39& q) const {
    return model_.sources(PointState::unpack(q)) - restSources_;
  }

  // Pointwise relaxation ODE by classical RK4 with substeps resolving the
  // fastest source frequency.
  void source_step(Field& q, double dt) const {
    const int sub = std::max(1, static_cast<int>(std::ceil(omegaSource_ * dt / 0.1)));
    const double h = dt / sub;
    for (int i = 0; i < static_cast<int>(q.size()); ++i) {
      Vec39& c = q[i];
      try {
        for (int s = 0; s < sub; ++s) {
          const Vec39 k1 = balanced_sources(c);
          const Vec39 k2 = balanced_sources(c + 0.5 * h * k1);
          const Vec39 k3 = balanced_sources(c + 0.5 * h * k2);
          const Vec39 k4 = balanced_sources(c + h * k3);
          c += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
      } catch (const DomainError& e) {
        throw SimulationAbort(std::string("relaxation left the admissible set: ") + e.what(), i, t_);
      }
    }
  }

  void check_face(const Vec39& q, int cell, double t) const {
    const double dA = get_block(q, block::A).determinant();
    const double dP = get_block(q, block::P).determinant();
    if (!(dA > 0.0)) throw SimulationAbort(fmt::format("reconstructed det(A) = {:.6g}", dA), cell, t);
    if (!(dP > 0.0)) throw SimulationAbort(fmt::format("reconstructed det(P) = {:.6g}", dP), cell, t);
  }

  void check_admissible(const Field& q) const {
    for (int i = 0; i < static_cast<int>(q.size()); ++i) {
      if (!q[i].allFinite()) throw SimulationAbort("non-finite state", i, t_);
      const double dA = get_block(q[i], block::A).determinant();
      const double dP = get_block(q[i], block::P).determinant();
      if (!(dA > 0.0)) throw SimulationAbort(fmt::format("det(A) = {:.6g}", dA), i, t_);
      if (!(dP > 0.0)) throw SimulationAbort(fmt::format("det(P) = {:.6g}", dP), i, t_);
    }
  }

  Model model_;
  Grid1D grid_;
  SimConfig cfg_;
  Field q_;
  double t_ = 0.0;
  long steps_ = 0;
  double cRest_ = 0.0;
  double omegaSource_ = 0.0;
  Vec39 restSources_ = Vec39::Zero();
  BodyForce force_;
};

// ---- initial data -------------------------------------------------------

inline Field uniform_field(const Grid1D& g, const PointState& s) { return Field(g.N, s.pack()); }

// Conservative field from primitive perturbations dw(x) of the rest state.
inline Field primitive_field(const Model& m, const Grid1D& g, const std::function<Vec39(double)>& dw) {
  Field q(g.N);
  const Vec39 w0 = primitive_at_rest();
  for (int i = 0; i < g.N; ++i) q[i] = from_primitive(m, w0 + dw(g.x(i))).pack();
  return q;
}

// Smooth periodic data touching every block: each primitive field gets its
// own single-wavelength sinusoid with a fixed phase.
inline Field smooth_field(const Model& m, const Grid1D& g, double amplitude) {
  const double kw = 2.0 * M_PI / g.L;
  const double vScale = m.params().C_l();
  return primitive_field(m, g, [&](double x) {
    Vec39 dw;
    for (int n = 0; n < kNumFields; ++n) {
      const double phase = 0.7 * n + 0.3 * n * n;
      double s = amplitude * std::sin(kw * x + phase);
      if (n < 3) s *= vScale;
      if (n >= block::B && n < block::D) s /= m.params().ell;  // curl of a distortion varies on the micro length
      dw[n] = s;
    }
    return dw;
  });
}

// ---- energy audit -------------------------------------------------------

inline EnergyAudit energy_audit(Simulation& sim, double tEnd, int samples = 20) {
  if (sim.grid().boundary != Boundary::periodic) throw std::invalid_argument("energy audit needs periodic boundaries");
  EnergyAudit a;
  const double e0 = sim.total_energy();
  const Vec3 m0 = sim.total_momentum();
  const double mScale = std::max(m0.norm(), sim.momentum_scale());
  auto record = [&]() {
    a.times.push_back(sim.time());
    a.totalEnergy.push_back(sim.total_energy());
    a.totalMomentum.push_back(sim.total_momentum());
    const double d = e0 != 0.0 ? (a.totalEnergy.back() - e0) / std::abs(e0) : a.totalEnergy.back();
    a.drift = d;
    a.maxDrift = std::max(a.maxDrift, std::abs(d));
    const double md = (a.totalMomentum.back() - m0).norm();
    a.momentumDrift = std::max(a.momentumDrift, mScale > 0.0 ? md / mScale : md);
  };
  record();
  for (int s = 1; s <= samples; ++s) {
    sim.run(tEnd * s / samples);
    record();
  }
  return a;
}

// ---- plane-wave probe ---------------------------------------------------

enum class ProbeBranch { shear_acoustic, longitudinal_acoustic };

inline const char* to_string(ProbeBranch b) {
  return b == ProbeBranch::shear_acoustic ? "shear_acoustic" : "longitudinal_acoustic";
}
inline ProbeBranch parse_probe_branch(const std::string& s) {
  if (s == "shear_acoustic") return ProbeBranch::shear_acoustic;
  if (s == "longitudinal_acoustic") return ProbeBranch::longitudinal_acoustic;
  throw std::invalid_argument("unknown probe branch '" + s + "'");
}

struct ProbeOptions {
  double k = 1.0;             // wavenumber, 1/m; the domain holds one wavelength
  double amplitude = 1e-6;    // peak distortion perturbation
  int N = 2000;
  double periods = 0.05;      // simulated fraction of a period
  int samples = 10;
  SimConfig sim;
};

struct ProbeResult {
  ProbeBranch branch = ProbeBranch::shear_acoustic;
  double k = 0.0;
  double omegaLinear = 0.0;     // from the dispersion relation
  double vLinear = 0.0;
  double vMeasured = 0.0;
  double relError = 0.0;        // |measured - linear| / linear
  double amplitudeRatio = 0.0;  // final over initial Fourier amplitude
  double seconds = 0.0;
  long steps = 0;
};

namespace detail {

inline std::size_t sector_index(const DispersionSolver& s, const std::string& name) {
  for (std::size_t i = 0; i < s.sectors().size(); ++i)
    if (s.sectors()[i].name == name) return i;
  throw std::logic_error("missing sector " + name);
}

// Fourier coefficient of one field at wavenumber k.
inline cplx fourier(const Field& q, const Grid1D& g, int field, double k) {
  cplx c = 0.0;
  for (int i = 0; i < g.N; ++i) c += q[i][field] * std::exp(cplx(0.0, -k * g.x(i)));
  return c * (2.0 / g.N);
}

// slope of a least-squares line through (x, y)
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

// Seeds one wavelength of the selected acoustic mode and measures its phase
// speed from the drift of the Fourier phase.
inline ProbeResult plane_wave_probe(const Model& model, ProbeBranch branch, const ProbeOptions& opt) {
  if (!(opt.k > 0.0)) throw std::invalid_argument("probe wavenumber must be positive");
  if (!(opt.periods > 0.0) || opt.samples < 2) throw std::invalid_argument("probe needs a positive duration");
  const auto t0 = std::chrono::steady_clock::now();
  const LinearSystem ls = linearize(model);
  const DispersionSolver solver(ls);
  const std::size_t sec =
      detail::sector_index(solver, branch == ProbeBranch::shear_acoustic ? "Ey" : "A1");
  const auto sp = solver.sector_spectrum(sec, opt.k);
  if (sp.positive.empty()) throw NumericalError("no propagating root in the probed sector");
  // With relaxation the acoustic branch is the lowest root. Without it every
  // branch is linear in k, and the macroscopic wave is the one carrying the
  // most velocity per unit distortion.
  double lambda = sp.positive.front();
  Eigen::VectorXcd r = solver.mode_shape(sec, opt.k, lambda);
  if (ls.S.cwiseAbs().maxCoeff() == 0.0) {
    auto participation = [](const Eigen::VectorXcd& m) {
      return m.head<3>().norm() / std::max(m.segment(block::A, 18).cwiseAbs().maxCoeff(), 1e-300);
    };
    double bestScore = participation(r);
    for (double l : sp.positive) {
      const Eigen::VectorXcd m = solver.mode_shape(sec, opt.k, l);
      if (participation(m) > bestScore) {
        bestScore = participation(m);
        lambda = l;
        r = m;
      }
    }
  }

  int peak = block::A;
  for (int n = block::A; n < block::B; ++n)
    if (std::abs(r[n]) > std::abs(r[peak])) peak = n;
  if (!(std::abs(r[peak]) > 0.0)) throw NumericalError("probe mode has no distortion component");
  r *= opt.amplitude * std::abs(r[peak]) / r[peak] / std::abs(r[peak]);

  ProbeResult res;
  res.branch = branch;
  res.k = opt.k;
  res.vLinear = lambda;
  res.omegaLinear = lambda * opt.k;

  const Grid1D g{opt.N, 2.0 * M_PI / opt.k};
  const Field init = primitive_field(model, g, [&](double x) -> Vec39 {
    return (r * std::exp(cplx(0.0, opt.k * x))).real();
  });
  SimConfig sc = opt.sim;
  Simulation sim(model, g, sc, init);

  const double period = 2.0 * M_PI / res.omegaLinear;
  const double tEnd = opt.periods * period;
  std::vector<double> ts, phases;
  const cplx c0 = detail::fourier(sim.state(), g, peak, opt.k);
  ts.push_back(0.0);
  phases.push_back(std::arg(c0));
  cplx last = c0;
  for (int s = 1; s <= opt.samples; ++s) {
    sim.run(tEnd * s / opt.samples);
    const cplx c = detail::fourier(sim.state(), g, peak, opt.k);
    double ph = phases.back() + std::arg(c / last);  // unwrap
    ts.push_back(sim.time());
    phases.push_back(ph);
    last = c;
  }
  const double omega = -detail::ls_slope(ts, phases);
  res.vMeasured = omega / opt.k;
  res.relError = std::abs(res.vMeasured - res.vLinear) / res.vLinear;
  res.amplitudeRatio = std::abs(last) / std::abs(c0);
  res.steps = sim.steps();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---- forcing inside and outside the gap --------------------------------

struct ForcingOptions {
  double omega = 0.0;
  int N = 400;
  double dx = 5e-3;
  double width = 4.0;          // Gaussian half-width in cells
  double velocity = 1e-3;      // target velocity amplitude near the source, m/s
  double rampPeriods = 5.0;
  double holdPeriods = 3.0;    // lock-in window after the ramp
  int farCells = 10;           // distance beyond the source region
  double threshold = 0.05;     // far/near ratio below which the field is evanescent
  SimConfig sim;
};

struct ForcingResult {
  double omega = 0.0;
  double nearAmplitude = 0.0;
  double farAmplitude = 0.0;
  double ratio = 0.0;
  bool evanescent = false;
  std::vector<double> amplitude;  // lock-in amplitude of v_x per cell
  double seconds = 0.0;
  long steps = 0;
};

// Drives x-momentum with a smooth Gaussian source at frequency omega and
// compares the carrier amplitude far from the source with the amplitude at it.
inline ForcingResult gap_forcing(const Model& model, const ForcingOptions& opt) {
  if (!(opt.omega > 0.0)) throw std::invalid_argument("forcing frequency must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const Grid1D g{opt.N, opt.N * opt.dx};
  Simulation sim(model, g, opt.sim, uniform_field(g, PointState{}));
  const double xc = 0.5 * g.L, sigma = opt.width * g.dx();
  const double period = 2.0 * M_PI / opt.omega;
  const double tRamp = opt.rampPeriods * period;
  const double f0 = model.params().rho0 * opt.omega * opt.velocity;
  sim.set_body_force([=](double x, double t) {
    const double ramp = t < tRamp ? 0.5 * (1.0 - std::cos(M_PI * t / tRamp)) : 1.0;
    const double r = (x - xc) / sigma;
    return Vec3(f0 * ramp * std::sin(opt.omega * t) * std::exp(-0.5 * r * r), 0.0, 0.0);
  });
  sim.run(tRamp);

  // lock-in over the hold window, trapezoid in time
  std::vector<cplx> acc(g.N, 0.0);
  double tPrev = sim.time();
  std::vector<double> vPrev(g.N);
  auto vx = [&](int i) { return model.velocity(PointState::unpack(sim.state()[i]))(0); };
  for (int i = 0; i < g.N; ++i) vPrev[i] = vx(i);
  const double tEnd = tRamp + opt.holdPeriods * period;
  sim.run(tEnd, [&](const Simulation& s) {
    const double t = s.time(), h = t - tPrev;
    const cplx e0 = std::exp(cplx(0.0, -opt.omega * tPrev)), e1 = std::exp(cplx(0.0, -opt.omega * t));
    for (int i = 0; i < g.N; ++i) {
      const double v = vx(i);
      acc[i] += 0.5 * h * (vPrev[i] * e0 + v * e1);
      vPrev[i] = v;
    }
    tPrev = t;
  });

  ForcingResult res;
  res.omega = opt.omega;
  res.amplitude.resize(g.N);
  const double window = opt.holdPeriods * period;
  for (int i = 0; i < g.N; ++i) {
    res.amplitude[i] = 2.0 * std::abs(acc[i]) / window;
    const double d = std::abs(g.x(i) - xc);
    if (d <= 2.0 * sigma) res.nearAmplitude = std::max(res.nearAmplitude, res.amplitude[i]);
    if (d >= 2.0 * sigma + opt.farCells * g.dx()) res.farAmplitude = std::max(res.farAmplitude, res.amplitude[i]);
  }
  res.ratio = res.nearAmplitude > 0.0 ? res.farAmplitude / res.nearAmplitude : 0.0;
  res.evanescent = res.ratio < opt.threshold;
  res.steps = sim.steps();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace tlab
