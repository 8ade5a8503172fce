// Launches the two acoustic eigenmodes on a periodic grid and compares the
// measured phase speed with the linear dispersion relation.
#include <torsionlab/sim1d.hpp>

#include <cstdlib>

#include <fmt/format.h>

using namespace tlab;

int main(int argc, char** argv) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  ProbeOptions o;
  o.N = argc > 1 ? std::atoi(argv[1]) : 400;
  for (ProbeBranch b : {ProbeBranch::shear_acoustic, ProbeBranch::longitudinal_acoustic}) {
    const ProbeResult r = plane_wave_probe(m, b, o);
    fmt::print("{:<22} N={} measured {:.5f} m/s  linear {:.5f} m/s  rel err {:.2e}  ({} steps, {:.1f} s)\n",
               to_string(b), o.N, r.vMeasured, r.vLinear, r.relError, r.steps, r.seconds);
  }
}
