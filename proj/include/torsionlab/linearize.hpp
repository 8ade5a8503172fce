#pragma once

#include "equilibrium.hpp"
#include "model.hpp"

#include <string>

namespace tlab {

struct FieldIndexMap {
  static constexpr int v(int i) { return block::M + i; }
  static constexpr int A(int r, int c) { return block::A + 3 * r + c; }
  static constexpr int P(int r, int c) { return block::P + 3 * r + c; }
  static constexpr int B(int r, int c) { return block::B + 3 * r + c; }
  static constexpr int D(int r, int c) { return block::D + 3 * r + c; }
  static std::string header() {
    std::string h;
    for (const auto& n : field_names(true)) h += (h.empty() ? "" : ",") + n;
    return h;
  }
};

// Primitive vector w = (v, A, P, B, D).
inline Vec39 to_primitive(const Model& m, const PointState& s) {
  Vec39 w = s.pack();
  const Vec3 v = m.velocity(s);
  for (int i = 0; i < 3; ++i) w[i] = v(i);
  return w;
}

inline PointState from_primitive(const Model& m, const Vec39& w) {
  PointState s = PointState::unpack(w);
  const Vec3 v(w[0], w[1], w[2]);
  s.M = m.density(s.A) * v - Model::torsion_momentum(s);
  return s;
}

inline Vec39 primitive_at_rest() { return PointState{}.pack(); }

// dq/dw by central differences
inline Mat39 primitive_jacobian(const Model& m, const Vec39& w) {
  Mat39 J;
  for (int n = 0; n < kNumFields; ++n) {
    const double h = 1e-6 * std::max(1.0, std::abs(w[n]));
    Vec39 wp = w, wm = w;
    wp[n] += h;
    wm[n] -= h;
    J.col(n) = (from_primitive(m, wp).pack() - from_primitive(m, wm).pack()) / (wp[n] - wm[n]);
  }
  return J;
}

struct LinearSystem {
  Mat39 C = Mat39::Zero();
  Mat39 S = Mat39::Zero();
  Vec39 residual = Vec39::Zero();  // sources at rest, excluded from S
  MaterialParams params;
  BaselineMode baseline = BaselineMode::raw;
};

namespace detail {

// First-order variations of Pi and piMicro about rest for A = I + a, P = I + p.
struct LinearForces {
  Mat3 Pi, pi;
};

inline LinearForces linear_forces(const Model& m, const Mat3& a, const Mat3& p) {
  const MaterialParams& k = m.params();
  const Mat3 I = Mat3::Identity();
  const double G = k.Gamma, g = k.gamma;
  const double r0 = k.rho0;
  auto symdev = [](const Mat3& x) { return dev(0.5 * (x + x.transpose())); };
  LinearForces f;
  f.Pi = r0 * k.C0 * k.C0 / (G - 1.0) * det_linear_gradient(a) + r0 * k.C0 * k.C0 * a.trace() * I +
         2.0 * r0 * k.Cs * k.Cs * symdev(a) + r0 * k.c0 * k.c0 / (g * (g - 1.0)) * det_linear_gradient(a) +
         r0 * k.c0 * k.c0 / g * p.trace() * I;
  f.pi = r0 * k.c0 * k.c0 / g * (a.trace() * I + det_linear_gradient(p)) +
         r0 * k.c0 * k.c0 * (g - 2.0) / g * p.trace() * I + 2.0 * r0 * k.cs * k.cs * symdev(p);
  if (m.baseline() == BaselineMode::stress_free) {
    f.Pi -= m.kA() * det_linear_gradient(a) + m.kP() * p.trace() * I;
    f.pi -= m.kP() * (a.trace() * I + det_linear_gradient(p));
  }
  return f;
}

// Rest values of Pi and piMicro are pA*I and pP*I.
inline double rest_pA(const Model& m) { return m.baseline() == BaselineMode::raw ? m.kA() : 0.0; }
inline double rest_pP(const Model& m) { return m.baseline() == BaselineMode::raw ? m.kP() : 0.0; }

template <class Fn>
inline void for_each_ap_unit(Fn&& fn) {
  for (int blk = 0; blk < 2; ++blk)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        Mat3 a = Mat3::Zero(), p = Mat3::Zero();
        (blk == 0 ? a : p)(r, c) = 1.0;
        fn(blk == 0 ? FieldIndexMap::A(r, c) : FieldIndexMap::P(r, c), a, p);
      }
}

}  // namespace detail

// Transport matrix along x at rest, assembled term by term.
inline Mat39 transport_matrix(const Model& m) {
  const MaterialParams& k = m.params();
  const double pA = detail::rest_pA(m), pP = detail::rest_pP(m);
  Mat39 C = Mat39::Zero();
  detail::for_each_ap_unit([&](int col, const Mat3& a, const Mat3& p) {
    const detail::LinearForces f = detail::linear_forces(m, a, p);
    const Mat3 dSigma = (pA * a.trace() + pP * p.trace()) * Mat3::Identity() - f.Pi.transpose() - pA * a;
    for (int i = 0; i < 3; ++i) C(FieldIndexMap::v(i), col) = -dSigma(0, i) / k.rho0;
  });
  for (int c = 0; c < 3; ++c) C(FieldIndexMap::A(c, 0), FieldIndexMap::v(c)) = 1.0;
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double e = levi(i, 0, j);
        if (e == 0.0) continue;
        C(FieldIndexMap::B(a, i), FieldIndexMap::D(a, j)) = e / k.epsilon;
        C(FieldIndexMap::D(a, i), FieldIndexMap::B(a, j)) = -e / k.mu;
      }
  return C;
}

// Same matrix from central differences of the discrete flux and
// nonconservative operators used by the solver.
inline Mat39 transport_matrix_fd(const Model& m) {
  const Vec39 w0 = primitive_at_rest();
  const PointState s0 = from_primitive(m, w0);
  const Mat39 Aj = primitive_jacobian(m, w0);
  const Vec3 v0 = m.velocity(s0);
  Mat39 K;
  for (int n = 0; n < kNumFields; ++n) {
    const double h = 1e-5 * std::max(1.0, std::abs(w0[n]));
    Vec39 wp = w0, wm = w0;
    wp[n] += h;
    wm[n] -= h;
    const Vec39 dF = (m.flux_x(from_primitive(m, wp)) - m.flux_x(from_primitive(m, wm))) / (wp[n] - wm[n]);
    Vec39 dw = Vec39::Zero();
    dw[n] = 1.0;
    const Vec3 dv(dw[0], dw[1], dw[2]);
    K.col(n) = dF + Model::nonconservative_x(s0, v0, Aj * dw, dv);
  }
  return Aj.partialPivLu().solve(K);
}

inline Mat39 source_jacobian(const Model& m, Vec39* residual = nullptr) {
  const Vec39 w0 = primitive_at_rest();
  const Mat39 Aj = primitive_jacobian(m, w0);
  Mat39 K;
  for (int n = 0; n < kNumFields; ++n) {
    const double h = 1e-5 * std::max(1.0, std::abs(w0[n]));
    Vec39 wp = w0, wm = w0;
    wp[n] += h;
    wm[n] -= h;
    K.col(n) = (m.sources(from_primitive(m, wp)) - m.sources(from_primitive(m, wm))) / (wp[n] - wm[n]);
  }
  if (residual) *residual = m.sources(from_primitive(m, w0));
  return Aj.partialPivLu().solve(K);
}

inline Mat39 source_jacobian_analytic(const Model& m) {
  const MaterialParams& k = m.params();
  const double ia = k.alpha.inverse(), ib = k.beta.inverse();
  const double pP = detail::rest_pP(m);
  Mat39 S = Mat39::Zero();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      S(FieldIndexMap::A(r, c), FieldIndexMap::D(r, c)) = -ia / k.epsilon;
      S(FieldIndexMap::P(r, c), FieldIndexMap::D(r, c)) = -ib / k.epsilon;
    }
  detail::for_each_ap_unit([&](int col, const Mat3& a, const Mat3& p) {
    const detail::LinearForces f = detail::linear_forces(m, a, p);
    const Mat3 dD = ia * f.Pi + ib * (f.pi + pP * (p.transpose() - a.transpose()));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) S(FieldIndexMap::D(r, c), col) = dD(r, c);
  });
  return S;
}

inline LinearSystem linearize(const Model& m) {
  LinearSystem ls;
  ls.C = transport_matrix(m);
  ls.S = source_jacobian(m, &ls.residual);
  ls.params = m.params();
  ls.baseline = m.baseline();
  return ls;
}

inline LinearSystem linearize(const MaterialParams& p, BaselineMode mode) { return linearize(Model(p, mode)); }

}  // namespace tlab
