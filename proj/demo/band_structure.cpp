// Prints the reference branches at a few wavenumbers next to the closed forms,
// then the band gap.
#include <torsionlab/dispersion.hpp>

#include <fmt/format.h>

using namespace tlab;

int main() {
  const MaterialParams p;
  const CutoffSet c = cutoffs(p);
  fmt::print("closed form: omega_inf {:.1f}  omega_0 {:.1f}  omega_s {:.1f}  omega_l {:.1f} rad/s\n", c.omegaInf,
             c.omega0, c.omegaS, c.omegaL);
  fmt::print("long-wave speeds: V_s {:.2f}  V_l {:.2f} m/s\n\n", c.Vs, c.Vl);

  const DispersionSolver solver(linearize(p, BaselineMode::raw));
  const SweepResult sw = sweep(solver, log_grid(0.1, 1e4, 401));
  fmt::print("{:>3} {:>3} {:>13} {:>10} {:>14} {:>14} {:>14}\n", "id", "sec", "class", "kind", "omega(k=0.1)",
             "omega(k=100)", "omega(k=1e4)");
  for (const Branch& b : sw.branches) {
    // k = 100 sits at index 240 of the log grid
    fmt::print("{:>3} {:>3} {:>13} {:>10} {:>14.1f} {:>14.1f} {:>14.1f}\n", b.id, b.sector, to_string(b.modeClass),
               to_string(b.kind), b.samples.front().omega, b.samples[240].omega, b.samples.back().omega);
  }

  const BandGapReport g = band_gaps(sw, &solver);
  if (g.gaps.empty()) fmt::print("\nno band gap\n");
  for (const BandGap& b : g.gaps) fmt::print("\nband gap {:.1f} .. {:.1f} rad/s (width {:.4g})\n", b.lo, b.hi, b.width());
}
