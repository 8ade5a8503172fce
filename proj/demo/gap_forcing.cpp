// Drives a localized body force at frequencies below, inside and above the
// band gap and prints how far the response reaches. The force points along x,
// so only the longitudinal branches respond: above the gap nothing propagates
// again until the longitudinal optical cutoff omega_s.
#include <torsionlab/sim1d.hpp>

#include <fmt/format.h>

using namespace tlab;

int main() {
  const Model m(MaterialParams{}, BaselineMode::raw);
  const CutoffSet c = cutoffs(m.params());
  for (double w : {0.5 * c.omegaInf, 0.5 * (c.omegaInf + c.omega0), 0.5 * (c.omegaS + c.omegaL)}) {
    ForcingOptions o;
    o.omega = w;
    const ForcingResult r = gap_forcing(m, o);
    fmt::print("omega {:>9.1f} rad/s  near {:.3e}  far {:.3e}  far/near {:.3e}  {}\n", w, r.nearAmplitude,
               r.farAmplitude, r.ratio, r.evanescent ? "evanescent" : "propagating");
  }
}
