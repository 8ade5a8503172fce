#pragma once

#include "params.hpp"
#include "state.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace tlab {

struct EnergyBreakdown {
  std::array<double, 7> E{};
  // Stress-free counterterms (zero in raw mode); kept apart so that the seven
  // physical contributions stay untouched.
  double counterterm = 0.0;
  double total = 0.0;
};

// All forces are stored with the layout of their conjugate field:
// Evec[A][k] = dE/dD, H[A][k] = dE/dB, Pi[A][k] = dE/dA, piMicro[a][A] = dE/dP.
struct ThermoForces {
  Mat3 Evec = Mat3::Zero();
  Mat3 H = Mat3::Zero();
  Mat3 Pi = Mat3::Zero();
  Mat3 piMicro = Mat3::Zero();
  Mat3 piConv = Mat3::Zero();  // [A][i]
  Mat3 EConv = Mat3::Zero();   // [a][A]
};

struct StressResult {
  Mat3 Sigma = Mat3::Zero();         // [k][i]
  double pressure = 0.0;
  Mat3 momentumFlux = Mat3::Zero();  // [k][i] = v^k M_i - Sigma^k_i
};

struct CancellationResult {
  double residual = 0.0;
  double scale = 0.0;  // largest of the four contracted terms
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

enum class ForceMode { closed_form, gradient };

class Model {
 public:
  explicit Model(MaterialParams p = MaterialParams::reference(), BaselineMode mode = BaselineMode::raw)
      : p_(p), mode_(mode) {
    p_.validate();
    // Counterterm constants come from the raw forces at rest through the same
    // arithmetic, so the normalized forces cancel bit for bit.
    const PointState eq;
    const BaselineMode keep = mode_;
    mode_ = BaselineMode::raw;
    const ThermoForces f = forces(eq);
    kA_ = f.Pi(0, 0);
    kP_ = f.piMicro(0, 0);
    E0_ = energy(eq).total;
    mode_ = keep;
  }

  const MaterialParams& params() const { return p_; }
  BaselineMode baseline() const { return mode_; }
  double kA() const { return kA_; }
  double kP() const { return kP_; }
  double E0() const { return E0_; }

  double density(const Mat3& A) const { return p_.rho0 * det_checked(A, "A"); }

  EnergyBreakdown energy(const PointState& s) const {
    const double dA = det_checked(s.A, "A");
    const double dP = det_checked(s.P, "P");
    const double rho = p_.rho0 * dA;
    const double G = p_.Gamma, g = p_.gamma;
    EnergyBreakdown e;
    e.E[0] = rho * p_.C0 * p_.C0 * std::pow(dA, G - 1.0) / (G * (G - 1.0));
    e.E[1] = rho * p_.Cs * p_.Cs / 4.0 * dev(s.A.transpose() * s.A).squaredNorm();
    e.E[2] = rho * p_.c0 * p_.c0 * std::pow(dP, g - 1.0) / (g * (g - 1.0));
    e.E[3] = rho * p_.cs * p_.cs / 4.0 * dev(s.P.transpose() * s.P).squaredNorm();
    e.E[4] = 0.5 * (s.D.squaredNorm() / p_.epsilon + s.B.squaredNorm() / p_.mu);
    e.E[5] = s.M.dot(torsion_momentum(s)) / rho;
    e.E[6] = s.M.squaredNorm() / (2.0 * rho);
    if (mode_ == BaselineMode::stress_free)
      e.counterterm = -kA_ * (dA - 1.0) - kP_ * dA * (dP - 1.0) - E0_;
    double sum = 0.0;
    for (double t : e.E) sum += t;
    e.total = sum + e.counterterm;
    return e;
  }

  double total_energy(const PointState& s) const { return energy(s).total; }

  // sum over frames of B_A x D_A
  static Vec3 torsion_momentum(const PointState& s) {
    Vec3 w = Vec3::Zero();
    for (int a = 0; a < 3; ++a) w += cross(s.B.row(a).transpose(), s.D.row(a).transpose());
    return w;
  }

  Vec3 velocity(const PointState& s) const { return (s.M + torsion_momentum(s)) / density(s.A); }

  ThermoForces forces(const PointState& s, ForceMode mode = ForceMode::closed_form) const {
    return mode == ForceMode::closed_form ? forces_closed(s, energy(s)) : forces_fd(s);
  }

  // Energy, forces and velocity from one pass; the hot path of the solver.
  struct Evaluation {
    EnergyBreakdown energy;
    ThermoForces forces;
    Vec3 v;
  };

  Evaluation evaluate(const PointState& s) const {
    Evaluation ev;
    ev.energy = energy(s);
    ev.forces = forces_closed(s, ev.energy);
    ev.v = (s.M + torsion_momentum(s)) / (p_.rho0 * s.A.determinant());
    return ev;
  }

  StressResult stress(const PointState& s) const { return stress(s, forces(s), velocity(s), energy(s).total); }

  StressResult stress(const PointState& s, const ThermoForces& f, const Vec3& v, double Etot) const {
    StressResult r;
    r.pressure = s.M.dot(v) + contract(s.D, f.Evec) + contract(s.B, f.H) - Etot;
    r.Sigma = -r.pressure * Mat3::Identity() - f.Pi.transpose() * s.A + s.D.transpose() * f.Evec +
              s.B.transpose() * f.H;
    r.momentumFlux = v * s.M.transpose() - r.Sigma;
    return r;
  }

  Vec39 sources(const PointState& s) const { return sources(forces(s)); }

  Vec39 sources(const ThermoForces& f) const {
    const double ia = p_.alpha.inverse(), ib = p_.beta.inverse();
    Vec39 r = Vec39::Zero();
    put_block(r, block::A, -ia * f.Evec);
    put_block(r, block::P, -ib * f.EConv);
    put_block(r, block::D, ia * f.Pi + ib * f.piConv);
    return r;
  }

  CancellationResult source_cancellation(const PointState& s) const {
    const ThermoForces f = forces(s);
    const double ia = p_.alpha.inverse(), ib = p_.beta.inverse();
    const double t1 = ia * contract(f.Evec, f.Pi);
    const double t2 = ib * contract(f.Evec, f.piConv);
    const double t3 = ia * contract(f.Pi, f.Evec);
    const double t4 = ib * contract(f.piMicro, f.EConv);
    CancellationResult c;
    c.residual = t1 + t2 - t3 - t4;
    c.scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
    return c;
  }

  // Full energy gradient in conservative variables: (v, Pi, piMicro, H, Evec).
  Vec39 energy_gradient(const PointState& s) const {
    const ThermoForces f = forces(s);
    Vec39 g;
    const Vec3 v = velocity(s);
    for (int i = 0; i < 3; ++i) g[i] = v(i);
    put_block(g, block::A, f.Pi);
    put_block(g, block::P, f.piMicro);
    put_block(g, block::B, f.H);
    put_block(g, block::D, f.Evec);
    return g;
  }

  // Conservative flux along x.
  Vec39 flux_x(const PointState& s) const {
    const ThermoForces f = forces(s);
    const Vec3 v = velocity(s);
    return flux_x(s, f, v, stress(s, f, v, energy(s).total));
  }

  Vec39 flux_x(const PointState& s, const ThermoForces& f, const Vec3& v, const StressResult& st) const {
    Vec39 F = Vec39::Zero();
    for (int i = 0; i < 3; ++i) F[block::M + i] = s.M(i) * v(0) - st.Sigma(0, i);
    Mat3 FB, FD;
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i) {
        double eb = 0.0, hd = 0.0;
        for (int j = 0; j < 3; ++j) {
          eb += levi(i, 0, j) * f.Evec(a, j);
          hd += levi(i, 0, j) * f.H(a, j);
        }
        FB(a, i) = s.B(a, i) * v(0) - v(i) * s.B(a, 0) + eb;
        FD(a, i) = s.D(a, i) * v(0) - v(i) * s.D(a, 0) - hd;
      }
    put_block(F, block::B, FB);
    put_block(F, block::D, FD);
    return F;
  }

  // Nonconservative products along x given increments dq of the state and dv
  // of the velocity across a cell.
  static Vec39 nonconservative_x(const PointState& s, const Vec3& v, const Vec39& dq, const Vec3& dv) {
    Vec39 n = Vec39::Zero();
    const Mat3 dA = get_block(dq, block::A), dP = get_block(dq, block::P);
    const Mat3 dB = get_block(dq, block::B), dD = get_block(dq, block::D);
    Mat3 tA = v(0) * dA;
    const Vec3 Adv = s.A * dv;
    for (int a = 0; a < 3; ++a) tA(a, 0) += Adv(a);
    Mat3 tB, tD;
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i) {
        tB(a, i) = v(i) * dB(a, 0);
        tD(a, i) = v(i) * dD(a, 0);
      }
    put_block(n, block::A, tA);
    put_block(n, block::P, v(0) * dP);
    put_block(n, block::B, tB);
    put_block(n, block::D, tD);
    return n;
  }

  double energy_flux_x(const PointState& s) const {
    const ThermoForces f = forces(s);
    const Vec3 v = velocity(s);
    const double Etot = energy(s).total;
    const StressResult st = stress(s, f, v, Etot);
    double poynting = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) poynting += levi(0, i, j) * f.Evec(a, i) * f.H(a, j);
    return Etot * v(0) - v.dot(st.Sigma.row(0).transpose()) + poynting;
  }

 private:
  ThermoForces forces_closed(const PointState& s, const EnergyBreakdown& e) const {
    const double dA = s.A.determinant();
    const double dP = s.P.determinant();
    const double rho = p_.rho0 * dA;
    const Mat3 F = s.A.inverse();
    const Mat3 FP = s.P.inverse();
    const double G = p_.Gamma, g = p_.gamma;
    ThermoForces f;
    const double coef = G * e.E[0] + e.E[1] + e.E[2] + e.E[3] - e.E[5] - e.E[6];
    f.Pi = coef * F.transpose() + rho * p_.Cs * p_.Cs * s.A * dev(s.A.transpose() * s.A);
    f.piMicro = rho * p_.c0 * p_.c0 / g * std::pow(dP, g - 1.0) * FP.transpose() +
                rho * p_.cs * p_.cs * s.P * dev(s.P.transpose() * s.P);
    if (mode_ == BaselineMode::stress_free) {
      f.Pi -= (kA_ + kP_ * (dP - 1.0)) * dA * F.transpose();
      f.piMicro -= kP_ * dA * dP * FP.transpose();
    }
    for (int a = 0; a < 3; ++a) {
      const Vec3 Ba = s.B.row(a).transpose(), Da = s.D.row(a).transpose();
      f.Evec.row(a) = (Da / p_.epsilon + cross(s.M, Ba) / rho).transpose();
      f.H.row(a) = (Ba / p_.mu - cross(s.M, Da) / rho).transpose();
    }
    convert(s, F, f);
    return f;
  }

  // Central differences of each energy contribution separately, then summed;
  // this keeps the large volumetric term from swamping the small ones.
  ThermoForces forces_fd(const PointState& s) const {
    const Vec39 q = s.pack();
    Vec39 grad = Vec39::Zero();
    for (int n = 0; n < kNumFields; ++n) {
      const double h = 1e-6 * std::max(1.0, std::abs(q[n]));
      Vec39 qp = q, qm = q;
      qp[n] += h;
      qm[n] -= h;
      const EnergyBreakdown ep = energy(PointState::unpack(qp));
      const EnergyBreakdown em = energy(PointState::unpack(qm));
      const double span = qp[n] - qm[n];
      double d = (ep.counterterm - em.counterterm) / span;
      for (int t = 0; t < 7; ++t) d += (ep.E[t] - em.E[t]) / span;
      grad[n] = d;
    }
    ThermoForces f;
    f.Pi = get_block(grad, block::A);
    f.piMicro = get_block(grad, block::P);
    f.H = get_block(grad, block::B);
    f.Evec = get_block(grad, block::D);
    convert(s, s.A.inverse(), f);
    return f;
  }

  static void convert(const PointState& s, const Mat3& F, ThermoForces& f) {
    f.piConv = s.P.transpose() * f.piMicro * F.transpose();
    f.EConv = s.P * f.Evec * F;
  }

  MaterialParams p_;
  BaselineMode mode_;
  double kA_ = 0.0, kP_ = 0.0, E0_ = 0.0;
};

inline double density(const Mat3& A, const MaterialParams& p) { return p.rho0 * det_checked(A, "A"); }

}  // namespace tlab
