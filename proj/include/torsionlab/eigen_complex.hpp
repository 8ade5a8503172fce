#pragma once

#include "tensor.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <vector>

#include <fmt/format.h>

namespace tlab {

using cplx = std::complex<double>;

namespace detail {

// Residual |(M - z I) x| / |x| after a few steps of inverse iteration, scaled
// by |M|.
inline double inverse_iteration_residual(const Eigen::MatrixXcd& M, cplx z, double scale) {
  const int n = static_cast<int>(M.rows());
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  // tiny shift keeps the factorization finite when z is exact
  const cplx shifted = z + cplx(1e-13 * scale, 1e-13 * scale);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M - shifted * I);
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
  for (int i = 0; i < n; ++i) x[i] += cplx(0.1 * std::sin(1.0 + i), 0.1 * std::cos(2.0 + i));
  for (int it = 0; it < 3; ++it) {
    x = lu.solve(x);
    const double nx = x.norm();
    if (!(nx > 0.0) || !std::isfinite(nx)) break;
    x /= nx;
  }
  if (!x.allFinite()) return 0.0;
  return ((M - z * I) * x).norm() / scale;
}

inline int null_count(const Eigen::MatrixXcd& M, cplx z, double tol) {
  const int n = static_cast<int>(M.rows());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M - z * Eigen::MatrixXcd::Identity(n, n));
  const auto& s = svd.singularValues();
  int c = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] <= tol * std::max(s[0], 1.0)) ++c;
  return c;
}

}  // namespace detail

// Eigenvalues of a complex matrix through its real 2n x 2n embedding
// [[X, -Y], [Y, X]], whose spectrum is that of M together with its conjugate.
inline std::vector<cplx> complex_eigenvalues(const Eigen::MatrixXcd& M) {
  const int n = static_cast<int>(M.rows());
  if (M.cols() != n) throw std::invalid_argument("complex_eigenvalues needs a square matrix");
  if (n == 0) return {};
  if (!M.allFinite()) throw std::invalid_argument("complex_eigenvalues: non-finite entries");

  Eigen::MatrixXd R(2 * n, 2 * n);
  R.topLeftCorner(n, n) = M.real();
  R.topRightCorner(n, n) = -M.imag();
  R.bottomLeftCorner(n, n) = M.imag();
  R.bottomRightCorner(n, n) = M.real();

  Eigen::RealSchur<Eigen::MatrixXd> schur(2 * n);
  schur.setMaxIterations(40 * 2 * n);
  schur.compute(R, false);
  if (schur.info() != Eigen::Success) {
    const Eigen::MatrixXd& T = schur.matrixT();
    double sub = 0.0;
    for (int i = 1; i < 2 * n; ++i) sub = std::max(sub, std::abs(T(i, i - 1)));
    throw NumericalError(fmt::format("real Schur iteration did not converge (largest subdiagonal {:.3e})", sub));
  }

  const Eigen::MatrixXd& T = schur.matrixT();
  std::vector<cplx> all;
  all.reserve(2 * n);
  for (int i = 0; i < 2 * n;) {
    if (i + 1 < 2 * n && T(i + 1, i) != 0.0) {
      const double a = T(i, i), b = T(i, i + 1), c = T(i + 1, i), d = T(i + 1, i + 1);
      const double tr = 0.5 * (a + d);
      const cplx disc = std::sqrt(cplx(0.25 * (a - d) * (a - d) + b * c, 0.0));
      all.push_back(tr + disc);
      all.push_back(tr - disc);
      i += 2;
    } else {
      all.push_back(T(i, i));
      i += 1;
    }
  }

  const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
  const double clusterTol = 1e-7 * scale;

  // greedy conjugate pairing
  std::vector<int> partner(all.size(), -1);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (partner[i] >= 0) continue;
    int best = -1;
    double bestDist = INFINITY;
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (j == i || partner[j] >= 0) continue;
      const double d = std::abs(all[j] - std::conj(all[i]));
      if (d < bestDist) {
        bestDist = d;
        best = static_cast<int>(j);
      }
    }
    partner[i] = best;
    partner[best] = static_cast<int>(i);
  }

  struct Pair {
    cplx z;  // representative with Im >= 0
    double resPlus, resMinus;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (static_cast<int>(i) > partner[i]) continue;
    const cplx a = all[i], b = all[partner[i]];
    cplx z = 0.5 * (a + std::conj(b));
    if (z.imag() < 0.0) z = std::conj(z);
    pairs.push_back({z, detail::inverse_iteration_residual(M, z, scale),
                     detail::inverse_iteration_residual(M, std::conj(z), scale)});
  }

  const double resTol = 1e-8;
  std::vector<cplx> out;
  out.reserve(n);
  std::vector<bool> done(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (done[i]) continue;
    const Pair& p = pairs[i];
    const bool nearReal = std::abs(p.z.imag()) <= clusterTol;
    const bool ambiguous = !nearReal && p.resPlus <= resTol && p.resMinus <= resTol;
    if (!ambiguous) {
      const double best = std::min(p.resPlus, p.resMinus);
      if (best > 1e-6)
        throw NumericalError(
            fmt::format("eigenvalue {}+{}i could not be confirmed (residual {:.3e})", p.z.real(), p.z.imag(), best));
      out.push_back(p.resPlus <= p.resMinus ? p.z : std::conj(p.z));
      done[i] = true;
      continue;
    }
    // Both z and conj(z) are eigenvalues: split the cluster by null counts.
    std::vector<std::size_t> cluster;
    for (std::size_t j = i; j < pairs.size(); ++j)
      if (!done[j] && std::abs(pairs[j].z - p.z) <= 1e3 * clusterTol) cluster.push_back(j);
    const int up = std::min<int>(detail::null_count(M, p.z, 1e-8), static_cast<int>(cluster.size()));
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      out.push_back(static_cast<int>(c) < up ? pairs[cluster[c]].z : std::conj(pairs[cluster[c]].z));
      done[cluster[c]] = true;
    }
  }
  if (static_cast<int>(out.size()) != n)
    throw NumericalError(fmt::format("eigenvalue pairing produced {} values for a {}x{} matrix", out.size(), n, n));
  return out;
}

}  // namespace tlab
