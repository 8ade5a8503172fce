#pragma once

#include "eigen_complex.hpp"
#include "linearize.hpp"
#include "symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace tlab {

struct EigenSolveResult {
  double k = 0.0;
  std::vector<cplx> lambdas;
  double maxImag = 0.0;
  double maxAbs = 0.0;
  int zeroCount = 0;
  bool real() const { return maxImag <= 1e-6 * maxAbs; }
};

inline int count_zeros(const std::vector<cplx>& l, double scale, double rel = 1e-9) {
  return static_cast<int>(std::count_if(l.begin(), l.end(), [&](cplx z) { return std::abs(z) <= rel * scale; }));
}

inline Eigen::MatrixXcd plane_wave_matrix(const Eigen::MatrixXd& C, const Eigen::MatrixXd& S, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be positive");
  return C.cast<cplx>() + cplx(0.0, 1.0 / k) * S.cast<cplx>();
}

// Phase velocities: eigenvalues of C + (i/k) S.
inline EigenSolveResult dispersion_at_k(const LinearSystem& ls, double k) {
  EigenSolveResult r;
  r.k = k;
  r.lambdas = complex_eigenvalues(plane_wave_matrix(ls.C, ls.S, k));
  for (const cplx& z : r.lambdas) {
    r.maxImag = std::max(r.maxImag, std::abs(z.imag()));
    r.maxAbs = std::max(r.maxAbs, std::abs(z));
  }
  r.zeroCount = count_zeros(r.lambdas, r.maxAbs);
  return r;
}

// Closed-form cutoffs and long-wave speeds, written in the inverse rates so
// that an infinite alpha or beta is just a zero coefficient.
struct CutoffSet {
  double omegaInf = 0.0, omega0 = 0.0, omegaS = 0.0, omegaL = 0.0;
  bool omegaSPresent = true;
  double Vl = 0.0, Vs = 0.0;
  double Cl = 0.0, Csval = 0.0, cInf = 0.0;
  std::optional<double> betaCrit;
  bool gapOpen() const { return omegaInf < omega0; }
};

namespace detail {
inline double root_or_zero(double x, bool* present = nullptr) {
  if (present) *present = x >= 0.0;
  return x >= 0.0 ? std::sqrt(x) : 0.0;
}
inline void fill_speeds(CutoffSet& c, const MaterialParams& p) {
  c.Cl = p.C_l();
  c.Csval = p.Cs;
  c.cInf = p.c_inf();
  if (!p.alpha.is_infinite())
    c.betaCrit = 2.0 * p.alpha.value() * std::sqrt((p.c0 * p.c0 + 2 * p.cs * p.cs) / (p.c0 * p.c0 + 3 * p.C0 * p.C0));
}
}  // namespace detail

inline CutoffSet cutoffs(const MaterialParams& p) {
  const double ia = p.alpha.inverse(), ib = p.beta.inverse();
  const double r = p.rho0, e = p.epsilon;
  const double c02 = p.c0 * p.c0, cs2 = p.cs * p.cs, C02 = p.C0 * p.C0, Cs2 = p.Cs * p.Cs;
  CutoffSet c;
  c.omegaInf = std::sqrt(r * ib * (c02 * (2 * ib + ia) + 4 * ib * cs2) / (3 * e));
  c.omega0 = std::sqrt(r * ia * (c02 * (2 * ib + ia) + 3 * ia * C02) / (6 * e));
  c.omegaS = detail::root_or_zero(
      r * (12 * ib * ib * cs2 - c02 * (2 * ia * ib + ia * ia) - 3 * ia * ia * (C02 - 4 * Cs2)) / (6 * e),
      &c.omegaSPresent);
  c.omegaL = std::sqrt(r * (c02 * (2 * ib + ia) * (3 * ib + ia) / 3 + 4 * ia * ia * C02) / e);
  const double vs2 = 4 * cs2 * Cs2 * ib * ib / (4 * cs2 * ib * ib - (C02 - 4 * Cs2) * ia * ia - c02 * (2 * ia * ib + ia * ia) / 3);
  c.Vs = detail::root_or_zero(vs2);
  const double denom = c02 * (2 * ib + ia) * (3 * ib + ia) + 12 * ia * ia * C02;
  c.Vl = detail::root_or_zero(3 * c02 * C02 * (2 * ib + ia) * ib / denom + 4 * vs2 / 3);
  detail::fill_speeds(c, p);
  return c;
}

// Equal-rate forms; both routes must agree when alpha = beta.
inline CutoffSet cutoffs_equal_rates(const MaterialParams& p) {
  if (!(p.alpha == p.beta) || p.alpha.is_infinite())
    throw std::invalid_argument("equal-rate cutoffs need finite alpha = beta");
  const double a2 = p.alpha.value() * p.alpha.value();
  const double r = p.rho0, e = p.epsilon;
  const double c02 = p.c0 * p.c0, cs2 = p.cs * p.cs, C02 = p.C0 * p.C0, Cs2 = p.Cs * p.Cs;
  CutoffSet c;
  c.omegaInf = std::sqrt(r * (c02 + 4 * cs2 / 3) / (a2 * e));
  c.omega0 = std::sqrt(r * (c02 + C02) / (2 * a2 * e));
  c.omegaS = detail::root_or_zero(r * (4 * cs2 - c02 - C02 + 4 * Cs2) / (2 * a2 * e), &c.omegaSPresent);
  c.omegaL = std::sqrt(4 * r * (c02 + C02) / (a2 * e));
  const double vs2 = 4 * cs2 * Cs2 / (4 * cs2 + 4 * Cs2 - C02 - c02);
  c.Vs = detail::root_or_zero(vs2);
  c.Vl = detail::root_or_zero(3 * c02 * C02 / (4 * (c02 + C02)) + 4 * vs2 / 3);
  detail::fill_speeds(c, p);
  return c;
}

// Squared phase velocities of the two rotational factors and their four roots.
struct RotationalRoots {
  double k = 0.0;
  std::array<double, 2> lambda2{};  // axial (cutoff omega0), transverse (cutoff omegaS)
  std::array<bool, 2> evanescent{};
  std::array<double, 4> roots{};    // +-sqrt of each lambda2 that is non-negative
};

namespace detail {
inline RotationalRoots make_roots(double k, double l1, double l2) {
  RotationalRoots r;
  r.k = k;
  r.lambda2 = {l1, l2};
  for (int i = 0; i < 2; ++i) {
    r.evanescent[i] = r.lambda2[i] < 0.0;
    const double s = r.evanescent[i] ? 0.0 : std::sqrt(r.lambda2[i]);
    r.roots[2 * i] = s;
    r.roots[2 * i + 1] = -s;
  }
  return r;
}
}  // namespace detail

inline RotationalRoots rotational_roots(const MaterialParams& p, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be positive");
  const double ia = p.alpha.inverse(), ib = p.beta.inverse();
  const double r = p.rho0, e = p.epsilon, ci2 = 1.0 / (p.epsilon * p.mu);
  const double c02 = p.c0 * p.c0, cs2 = p.cs * p.cs, C02 = p.C0 * p.C0, Cs2 = p.Cs * p.Cs;
  const double w02 = r * ia * (c02 * (2 * ib + ia) + 3 * ia * C02) / (6 * e);
  const double ws2 = r * (12 * ib * ib * cs2 - c02 * (2 * ia * ib + ia * ia) - 3 * ia * ia * (C02 - 4 * Cs2)) / (6 * e);
  return detail::make_roots(k, ci2 + w02 / (k * k), ci2 + ws2 / (k * k));
}

inline RotationalRoots rotational_roots_equal_rates(const MaterialParams& p, double k) {
  if (!(p.alpha == p.beta) || p.alpha.is_infinite())
    throw std::invalid_argument("equal-rate roots need finite alpha = beta");
  if (!(k > 0.0)) throw std::invalid_argument("wavenumber must be positive");
  const double a2k2 = p.alpha.value() * p.alpha.value() * k * k;
  const double ci2 = 1.0 / (p.epsilon * p.mu);
  const double c02 = p.c0 * p.c0, cs2 = p.cs * p.cs, C02 = p.C0 * p.C0, Cs2 = p.Cs * p.Cs;
  return detail::make_roots(k, ci2 + p.rho0 * (c02 + C02) / (2 * p.epsilon * a2k2),
                            ci2 + p.rho0 * (4 * cs2 + 4 * Cs2 - c02 - C02) / (2 * p.epsilon * a2k2));
}

// Per-sector plane-wave spectra.
class DispersionSolver {
 public:
  struct SectorSpectrum {
    std::vector<cplx> lambdas;
    std::vector<double> positive;  // ascending real parts of the right-going roots
    int zeros = 0;
    double maxImag = 0.0;
    double maxAbs = 0.0;
    double symmetryError = 0.0;  // mismatch between +lambda and -lambda sets, relative
  };

  explicit DispersionSolver(const LinearSystem& ls) : ls_(ls), sectors_(symmetry_sectors()) {
    for (const Sector& s : sectors_) {
      Cs_.push_back(s.basis.transpose() * ls_.C * s.basis);
      Ss_.push_back(s.basis.transpose() * ls_.S * s.basis);
    }
    Eigen::EigenSolver<Mat39> es(ls_.C, false);
    cmax_ = es.eigenvalues().cwiseAbs().maxCoeff();
  }

  const LinearSystem& system() const { return ls_; }
  const std::vector<Sector>& sectors() const { return sectors_; }
  double max_transport_speed() const { return cmax_; }

  // Largest violation of sector invariance of C and S.
  double commutation_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
      const Eigen::MatrixXd& Q = sectors_[i].basis;
      const Eigen::MatrixXd P = Q * Q.transpose();
      const Eigen::MatrixXd C = ls_.C, S = ls_.S;
      worst = std::max(worst, (P * C - C * P).cwiseAbs().maxCoeff() / std::max(C.cwiseAbs().maxCoeff(), 1e-300));
      worst = std::max(worst, (P * S - S * P).cwiseAbs().maxCoeff() / std::max(S.cwiseAbs().maxCoeff(), 1e-300));
    }
    return worst;
  }

  SectorSpectrum sector_spectrum(std::size_t s, double k) const {
    SectorSpectrum r;
    r.lambdas = complex_eigenvalues(plane_wave_matrix(Cs_[s], Ss_[s], k));
    for (const cplx& z : r.lambdas) {
      r.maxImag = std::max(r.maxImag, std::abs(z.imag()));
      r.maxAbs = std::max(r.maxAbs, std::abs(z));
    }
    std::vector<double> neg;
    for (const cplx& z : r.lambdas) {
      if (std::abs(z) <= 1e-9 * r.maxAbs)
        ++r.zeros;
      else if (z.real() > 0.0)
        r.positive.push_back(z.real());
      else
        neg.push_back(-z.real());
    }
    std::sort(r.positive.begin(), r.positive.end());
    std::sort(neg.begin(), neg.end());
    if (neg.size() != r.positive.size()) {
      r.symmetryError = INFINITY;
    } else {
      for (std::size_t i = 0; i < neg.size(); ++i)
        r.symmetryError = std::max(r.symmetryError, std::abs(neg[i] - r.positive[i]) / r.maxAbs);
    }
    return r;
  }

  // Frequency of the root in sector s closest to a guess.
  double omega_near(std::size_t s, double k, double omegaGuess) const {
    const SectorSpectrum sp = sector_spectrum(s, k);
    double best = NAN, dist = INFINITY;
    for (double l : sp.positive)
      if (std::abs(k * l - omegaGuess) < dist) {
        dist = std::abs(k * l - omegaGuess);
        best = k * l;
      }
    return best;
  }

  // Eigenvector of C + (i/k) S in the full 39-space for the root of sector s
  // closest to lambda. Sectors are at most 9-dimensional, so a dense solve is
  // cheap and copes with the degenerate spectra of the source-free system.
  Eigen::VectorXcd mode_shape(std::size_t s, double k, double lambda) const {
    const Eigen::MatrixXcd M = plane_wave_matrix(Cs_[s], Ss_[s], k);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, true);
    if (es.info() != Eigen::Success) throw NumericalError("mode shape eigen-solve failed");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i] - lambda) < std::abs(es.eigenvalues()[best] - lambda)) best = i;
    Eigen::VectorXcd x = es.eigenvectors().col(best);
    x /= x.norm();
    return sectors_[s].basis.cast<cplx>() * x;
  }

 private:
  LinearSystem ls_;
  std::vector<Sector> sectors_;
  std::vector<Eigen::MatrixXd> Cs_, Ss_;
  double cmax_ = 0.0;
};

enum class BranchKind { acoustic, optical };
inline const char* to_string(BranchKind k) { return k == BranchKind::acoustic ? "acoustic" : "optical"; }

struct BranchSample {
  double k = 0.0, omega = 0.0, vPhase = 0.0, vGroup = 0.0;
};

struct Branch {
  int id = 0;
  std::string sector;
  std::size_t sectorIndex = 0;
  ModeClass modeClass = ModeClass::zero;
  BranchKind kind = BranchKind::optical;
  bool unresolved = false;
  double cutoff = 0.0;  // extrapolated k -> 0 frequency (0 for acoustic)
  std::vector<BranchSample> samples;
  double omega_min() const {
    double m = INFINITY;
    for (const auto& s : samples) m = std::min(m, s.omega);
    return m;
  }
  double omega_max() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.omega);
    return m;
  }
};

struct SweepStats {
  double maxImagRel = 0.0;
  int zeroMin = 1 << 30, zeroMax = 0;
  double symmetryError = 0.0;
  std::map<std::string, int> positiveRoots;  // per sector
};

struct SweepResult {
  std::vector<double> k;
  std::vector<Branch> branches;
  SweepStats stats;
  double omega_max() const {
    double m = 0.0;
    for (const auto& b : branches) m = std::max(m, b.omega_max());
    return m;
  }
};

inline std::vector<double> log_grid(double kmin, double kmax, int n) {
  if (!(kmin > 0.0) || !(kmax > kmin) || n < 3) throw std::invalid_argument("invalid wavenumber grid");
  std::vector<double> k(n);
  for (int i = 0; i < n; ++i) k[i] = kmin * std::pow(kmax / kmin, double(i) / (n - 1));
  return k;
}

// dω/dk on a nonuniform grid: three-point central formula inside, three-point
// one-sided formulas at both ends.
inline std::vector<double> group_velocity(const Branch& b) {
  const auto& s = b.samples;
  const std::size_t n = s.size();
  if (n < 3) throw std::invalid_argument("group velocity needs at least three samples");
  std::vector<double> g(n);
  auto three = [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t at) {
    const double x0 = s[i0].k, x1 = s[i1].k, x2 = s[i2].k, x = s[at].k;
    const double d0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    const double d1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    const double d2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    return d0 * s[i0].omega + d1 * s[i1].omega + d2 * s[i2].omega;
  };
  g[0] = three(0, 1, 2, 0);
  for (std::size_t i = 1; i + 1 < n; ++i) g[i] = three(i - 1, i, i + 1, i);
  g[n - 1] = three(n - 3, n - 2, n - 1, n - 1);
  return g;
}

namespace detail {

// Optimal assignment for a handful of branches by enumeration; also reports
// whether a different assignment is practically as good.
inline std::vector<int> assign(const std::vector<double>& pred, const std::vector<double>& cand, bool& ambiguous) {
  const int n = static_cast<int>(pred.size());
  std::vector<int> perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double bestCost = INFINITY, second = INFINITY;
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += std::abs(cand[perm[i]] - pred[i]);
    if (c < bestCost) {
      second = bestCost;
      bestCost = c;
      best = perm;
    } else if (c < second) {
      second = c;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  double scale = 0.0;
  for (double x : cand) scale = std::max(scale, std::abs(x));
  ambiguous = n > 1 && second - bestCost <= 1e-9 * scale;
  return best;
}

}  // namespace detail

// Branches by continuation in each symmetry sector.
inline SweepResult sweep(const DispersionSolver& solver, const std::vector<double>& kGrid) {
  for (std::size_t i = 1; i < kGrid.size(); ++i)
    if (!(kGrid[i] > kGrid[i - 1]) || !(kGrid[0] > 0.0))
      throw std::invalid_argument("wavenumber grid must be positive and strictly increasing");
  if (kGrid.size() < 3) throw std::invalid_argument("wavenumber grid needs at least three points");

  SweepResult out;
  out.k = kGrid;
  int nextId = 0;
  const double cmax = solver.max_transport_speed();
  std::vector<int> zerosPerK(kGrid.size(), 0);
  for (std::size_t s = 0; s < solver.sectors().size(); ++s) {
    const Sector& sec = solver.sectors()[s];
    std::vector<Branch> br;
    for (std::size_t ik = 0; ik < kGrid.size(); ++ik) {
      const double k = kGrid[ik];
      const DispersionSolver::SectorSpectrum sp = solver.sector_spectrum(s, k);
      zerosPerK[ik] += sp.zeros;
      out.stats.maxImagRel = std::max(out.stats.maxImagRel, sp.maxImag / std::max(sp.maxAbs, 1e-300));
      out.stats.symmetryError = std::max(out.stats.symmetryError, sp.symmetryError);
      std::vector<double> om;
      for (double l : sp.positive) om.push_back(k * l);
      if (ik == 0) {
        out.stats.positiveRoots[sec.name] = static_cast<int>(om.size());
        for (std::size_t j = 0; j < om.size(); ++j) {
          Branch b;
          b.sector = sec.name;
          b.sectorIndex = s;
          b.modeClass = sec.modeClass;
          br.push_back(b);
        }
      }
      if (om.size() != br.size())
        throw NumericalError(fmt::format("sector {}: {} propagating roots at k={} but {} branches tracked", sec.name,
                                         om.size(), k, br.size()));
      std::vector<int> perm(om.size());
      if (ik == 0) {
        std::iota(perm.begin(), perm.end(), 0);
      } else {
        std::vector<double> pred(br.size());
        for (std::size_t j = 0; j < br.size(); ++j) {
          const auto& smp = br[j].samples;
          const std::size_t m = smp.size();
          pred[j] = m >= 2 ? smp[m - 1].omega + (smp[m - 1].omega - smp[m - 2].omega) * (k - smp[m - 1].k) /
                                                    (smp[m - 1].k - smp[m - 2].k)
                           : smp[m - 1].omega;
        }
        bool amb = false;
        perm = detail::assign(pred, om, amb);
        if (amb)
          for (auto& b : br) b.unresolved = true;
      }
      for (std::size_t j = 0; j < br.size(); ++j) br[j].samples.push_back({k, om[perm[j]], om[perm[j]] / k, 0.0});
    }
    for (Branch& b : br) {
      const std::vector<double> g = group_velocity(b);
      for (std::size_t i = 0; i < g.size(); ++i) b.samples[i].vGroup = g[i];
      b.kind = b.samples.front().vPhase <= 2.0 * cmax ? BranchKind::acoustic : BranchKind::optical;
      if (b.kind == BranchKind::optical) {
        const double k1 = b.samples[0].k, k2 = b.samples[1].k;
        const double w1 = b.samples[0].omega, w2 = b.samples[1].omega;
        b.cutoff = (k2 * k2 * w1 - k1 * k1 * w2) / (k2 * k2 - k1 * k1);
      }
    }
    std::sort(br.begin(), br.end(), [](const Branch& a, const Branch& b) {
      return a.samples.front().omega < b.samples.front().omega;
    });
    for (Branch& b : br) {
      b.id = nextId++;
      out.branches.push_back(std::move(b));
    }
  }
  // zero multiplicity of the whole 39-dimensional problem, per k
  for (int z : zerosPerK) {
    out.stats.zeroMin = std::min(out.stats.zeroMin, z);
    out.stats.zeroMax = std::max(out.stats.zeroMax, z);
  }
  return out;
}

inline SweepResult sweep(const LinearSystem& ls, const std::vector<double>& kGrid) {
  return sweep(DispersionSolver(ls), kGrid);
}

struct BandGap {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
};

struct BandGapReport {
  std::vector<BandGap> gaps;
  bool complete = false;  // gaps are common to every polarization
  double total_width() const {
    double w = 0.0;
    for (const auto& g : gaps) w += g.width();
    return w;
  }
};

namespace detail {

// Refine an interior extremum of a branch by bisection on the sign of dω/dk.
inline double refine_extremum(const DispersionSolver& solver, const Branch& b, std::size_t i, bool isMax) {
  double lo = b.samples[i - 1].k, hi = b.samples[i + 1].k;
  double guess = b.samples[i].omega;
  auto slope = [&](double k) {
    const double h = 1e-6 * k;
    const double a = solver.omega_near(b.sectorIndex, k + h, guess);
    const double c = solver.omega_near(b.sectorIndex, k - h, guess);
    return (a - c) * (isMax ? 1.0 : -1.0);
  };
  while ((hi - lo) > 1e-4 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return solver.omega_near(b.sectorIndex, 0.5 * (lo + hi), guess);
}

}  // namespace detail

// Complement of the frequencies reached by any branch inside [0, omegaMax].
inline BandGapReport band_gaps(const std::vector<Branch>& branches, double omegaMax,
                               const DispersionSolver* refine = nullptr) {
  std::vector<std::pair<double, double>> cover;
  for (const Branch& b : branches) {
    double lo = b.omega_min(), hi = b.omega_max();
    if (refine) {
      for (std::size_t i = 1; i + 1 < b.samples.size(); ++i) {
        const double w = b.samples[i].omega;
        if (w == hi && w > b.samples[i - 1].omega && w > b.samples[i + 1].omega)
          hi = std::max(hi, detail::refine_extremum(*refine, b, i, true));
        if (w == lo && w < b.samples[i - 1].omega && w < b.samples[i + 1].omega)
          lo = std::min(lo, detail::refine_extremum(*refine, b, i, false));
      }
    }
    if (b.kind == BranchKind::acoustic)
      lo = 0.0;
    else
      lo = std::min(lo, b.cutoff);
    cover.push_back({lo, hi});
  }
  std::sort(cover.begin(), cover.end());
  BandGapReport r;
  double reach = 0.0;
  for (const auto& [lo, hi] : cover) {
    if (lo > reach && reach < omegaMax) r.gaps.push_back({reach, std::min(lo, omegaMax)});
    reach = std::max(reach, hi);
  }
  r.complete = !r.gaps.empty();
  return r;
}

inline BandGapReport band_gaps(const SweepResult& sw, const DispersionSolver* refine = nullptr) {
  return band_gaps(sw.branches, sw.omega_max(), refine);
}

}  // namespace tlab
