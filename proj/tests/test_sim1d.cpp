#include <gtest/gtest.h>

#include <torsionlab/sim1d.hpp>

using namespace tlab;

namespace {

double max_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

MaterialParams no_relaxation() {
  MaterialParams p;
  p.alpha = p.beta = Relaxation::infinite();
  return p;
}

}  // namespace

TEST(Grid, Validation) {
  EXPECT_THROW((Grid1D{8, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((Grid1D{32, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((Grid1D{16, 1.0}.validate()));
  EXPECT_DOUBLE_EQ((Grid1D{100, 2.0}.dx()), 0.02);
  SimConfig c;
  c.cfl = 0.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_source_scheme("explicit_split"), SourceScheme::explicit_split);
  EXPECT_EQ(parse_reconstruction("muscl_minmod"), Reconstruction::muscl_minmod);
  EXPECT_THROW(parse_reconstruction("weno"), std::invalid_argument);
}

TEST(Step, UniformEquilibriumIsSteady) {
  for (BaselineMode mode : {BaselineMode::raw, BaselineMode::stress_free}) {
    const Model m(MaterialParams{}, mode);
    const Grid1D g{16, 0.1};
    const Field init = uniform_field(g, equilibrium_state(m.params()));
    Simulation sim(m, g, SimConfig{}, init);
    const double dt = sim.stable_dt();
    for (int n = 0; n < 10000; ++n) sim.step(dt);
    EXPECT_LE(max_diff(sim.state(), init), 1e-14) << to_string(mode);
  }
}

TEST(Step, UniformMotionStaysUniform) {
  // without relaxation a uniformly moving body is an exact steady state
  const Model m(no_relaxation(), BaselineMode::raw);
  const Grid1D g{32, 1.0};
  PointState s;
  s.M = m.density(s.A) * Vec3(3.0, -1.0, 0.5);
  const Field init = uniform_field(g, s);
  Simulation sim(m, g, SimConfig{}, init);
  sim.run(20 * sim.stable_dt());
  EXPECT_LE(max_diff(sim.state(), init), 1e-14 * init[0].cwiseAbs().maxCoeff());

  // with relaxation the kinetic energy feeds the sources, but the state stays
  // the same in every cell
  const Model mr(MaterialParams{}, BaselineMode::raw);
  Simulation sr(mr, g, SimConfig{}, init);
  sr.run(20 * sr.stable_dt());
  for (const Vec39& c : sr.state()) EXPECT_EQ(c, sr.state()[0]);
}

TEST(Step, RiemannFanBoundedBySoundSpeed) {
  const MaterialParams p = no_relaxation();
  const Model m(p, BaselineMode::raw);
  const Grid1D g{400, 1.0};
  Field init = uniform_field(g, PointState{});
  for (int i = 0; i < g.N / 2; ++i) init[i][block::A] += 1e-3;
  Simulation sim(m, g, SimConfig{}, init);
  const double t = 0.1 * g.L / p.C_l();
  sim.run(t);
  // jumps sit at x = 0.5 and x = 0 (periodic)
  // Rusanov smearing gives an exponential tail ahead of the front
  const double reach = p.C_l() * t + 20 * g.dx();
  double outside = 0.0, inside = 0.0;
  for (int i = 0; i < g.N; ++i) {
    const double d = std::min({std::abs(g.x(i) - 0.5), g.x(i), g.L - g.x(i)});
    Vec39 dev = (sim.state()[i] - init[i]).cwiseAbs();
    dev.head<3>() /= p.rho0 * p.C_l();
    double& slot = d > reach ? outside : inside;
    slot = std::max(slot, dev.maxCoeff());
  }
  EXPECT_GT(inside, 1e-4);
  EXPECT_LT(outside, 1e-10);
}

TEST(Step, AbortReportsCell) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  const Grid1D g{32, 1.0};
  Field init = uniform_field(g, PointState{});
  PointState bad;
  bad.A = -Mat3::Identity();
  init[7] = bad.pack();
  try {
    Simulation sim(m, g, SimConfig{}, init);
    FAIL() << "inadmissible state accepted";
  } catch (const SimulationAbort& e) {
    EXPECT_EQ(e.cell(), 7);
    EXPECT_EQ(e.time(), 0.0);
  }
}

TEST(Step, UnstableStepAbortsWithDiagnostics) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  const Grid1D g{64, 1.0};
  Simulation sim(m, g, SimConfig{}, smooth_field(m, g, 1e-2));
  // far beyond the CFL limit the explicit update leaves the admissible set
  const double dt = 2000.0 * sim.stable_dt();
  try {
    for (int n = 0; n < 5; ++n) sim.step(dt);
    FAIL() << "no abort";
  } catch (const SimulationAbort& e) {
    EXPECT_GE(e.cell(), 0);
    EXPECT_LT(e.cell(), g.N);
    EXPECT_NE(std::string(e.what()).find("cell"), std::string::npos);
  }
}

TEST(Audit, ZeroPerturbationHasZeroDrift) {
  const Model m(MaterialParams{}, BaselineMode::stress_free);
  const Grid1D g{32, 1.0};
  Simulation sim(m, g, SimConfig{}, uniform_field(g, PointState{}));
  const EnergyAudit a = energy_audit(sim, 1e-4, 4);
  EXPECT_EQ(a.drift, 0.0);
  EXPECT_EQ(a.maxDrift, 0.0);
  EXPECT_EQ(a.times.size(), 5u);
}

TEST(Audit, FirstOrderEnergyAndMomentum) {
  const Grid1D g{1000, 1.0};
  SimConfig c;
  c.reconstruction = Reconstruction::first_order;
  // Relative to the full raw energy, which includes the rest-state energy.
  {
    const Model m(MaterialParams{}, BaselineMode::raw);
    Simulation sim(m, g, c, smooth_field(m, g, 1e-3));
    const EnergyAudit a = energy_audit(sim, g.L / m.params().C_l(), 2);
    EXPECT_LE(a.maxDrift, 1e-3);
    EXPECT_LE(a.momentumDrift, 1e-12);
  }
  // Relative to the wave energy alone the first-order scheme loses what its
  // numerical viscosity a dx / 2 predicts for one wavelength: dx L k^2.
  {
    const Model m(MaterialParams{}, BaselineMode::stress_free);
    const Grid1D coarse{250, 1.0};
    Simulation sim(m, coarse, c, smooth_field(m, coarse, 1e-3));
    const EnergyAudit a = energy_audit(sim, coarse.L / m.params().C_l(), 2);
    const double k = 2.0 * M_PI / coarse.L;
    const double predicted = coarse.dx() * coarse.L * k * k;
    EXPECT_NEAR(-a.drift, predicted, 0.2 * predicted);
    EXPECT_LE(a.momentumDrift, 1e-12);
  }
}

TEST(Audit, SourcesDoNotChangeDriftScale) {
  const Model m(MaterialParams{}, BaselineMode::stress_free);
  const Grid1D g{200, 1.0};
  const double t = g.L / m.params().C_l();
  double drift[2];
  for (int on = 0; on < 2; ++on) {
    SimConfig c;
    c.sources = on == 1;
    Simulation sim(m, g, c, smooth_field(m, g, 1e-3));
    drift[on] = energy_audit(sim, t, 2).maxDrift;
  }
  EXPECT_GT(drift[0], 0.0);
  EXPECT_LT(drift[1] / drift[0], 10.0);
  EXPECT_GT(drift[1] / drift[0], 0.1);
}

TEST(Audit, MidpointSplittingBeatsLie) {
  const Model m(MaterialParams{}, BaselineMode::stress_free);
  const Grid1D g{100, 1.0};
  const double t = 0.2 * g.L / m.params().C_l();
  auto run = [&](SourceScheme scheme, double cfl) {
    SimConfig c;
    c.sourceScheme = scheme;
    c.cfl = cfl;
    Simulation sim(m, g, c, smooth_field(m, g, 1e-4));
    sim.run(t);
    return sim.state();
  };
  const Field ref = run(SourceScheme::midpoint_split, 0.05);
  const double lie = max_diff(run(SourceScheme::explicit_split, 0.45), ref);
  const double strang = max_diff(run(SourceScheme::midpoint_split, 0.45), ref);
  EXPECT_LT(strang, lie);
}

TEST(Audit, Deterministic) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  const Grid1D g{64, 1.0};
  Field out[2];
  for (int r = 0; r < 2; ++r) {
    Simulation sim(m, g, SimConfig{}, smooth_field(m, g, 1e-3));
    sim.run(50 * 1e-6);
    out[r] = sim.state();
  }
  EXPECT_EQ(max_diff(out[0], out[1]), 0.0);
}

TEST(Probe, AcousticSpeedsAtModerateResolution) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  ProbeOptions o;
  o.N = 200;
  const ProbeResult s = plane_wave_probe(m, ProbeBranch::shear_acoustic, o);
  EXPECT_NEAR(s.vMeasured, 113.9, 0.02 * 113.9);
  EXPECT_LT(s.relError, 1e-3);
  const ProbeResult l = plane_wave_probe(m, ProbeBranch::longitudinal_acoustic, o);
  EXPECT_NEAR(l.vMeasured, 156.8, 0.02 * 156.8);
  EXPECT_LT(l.relError, 1e-3);
}

TEST(Probe, NoRelaxationGivesMacroSpeed) {
  const MaterialParams p = no_relaxation();
  const Model m(p, BaselineMode::raw);
  ProbeOptions o;
  o.N = 200;
  const ProbeResult l = plane_wave_probe(m, ProbeBranch::longitudinal_acoustic, o);
  EXPECT_NEAR(l.vMeasured, p.C_l(), 0.01 * p.C_l());
}

TEST(Probe, MusclConvergesAtSecondOrder) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  double err[3];
  const int Ns[3] = {50, 100, 200};
  for (int i = 0; i < 3; ++i) {
    ProbeOptions o;
    o.N = Ns[i];
    err[i] = plane_wave_probe(m, ProbeBranch::shear_acoustic, o).relError;
  }
  EXPECT_GE(err[0] / err[1], 1.7);
  EXPECT_GE(err[1] / err[2], 1.7);
}

TEST(Probe, RejectsBadOptions) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  ProbeOptions o;
  o.k = 0.0;
  EXPECT_THROW(plane_wave_probe(m, ProbeBranch::shear_acoustic, o), std::invalid_argument);
  EXPECT_EQ(parse_probe_branch("shear_acoustic"), ProbeBranch::shear_acoustic);
  EXPECT_THROW(parse_probe_branch("optical"), std::invalid_argument);
}

TEST(Forcing, EvanescentInsideGapPropagatingBelow) {
  const Model m(MaterialParams{}, BaselineMode::raw);
  const CutoffSet c = cutoffs(m.params());
  ForcingOptions in;
  in.omega = 0.5 * (c.omegaInf + c.omega0);
  const ForcingResult r = gap_forcing(m, in);
  EXPECT_TRUE(r.evanescent) << r.ratio;
  EXPECT_GT(r.nearAmplitude, 0.0);

  ForcingOptions below = in;
  below.omega = 0.5 * c.omegaInf;
  const ForcingResult q = gap_forcing(m, below);
  EXPECT_FALSE(q.evanescent) << q.ratio;
}
