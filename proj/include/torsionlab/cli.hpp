#pragma once

#include "checks.hpp"
#include "io.hpp"
#include "sim1d.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace tlab::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct DispersionConfig {
  double kmin = 0.1;
  double kmax = 1e4;
  int nk = 400;
  bool svg = true;
  double gapResolution = 10.0;  // rad/s; narrower gaps are reported as closed
};

struct SweepBetaConfig {
  double betaMin = 33.18;
  double betaMax = 100.0;
  int n = 20;
  double kmin = 0.1;
  double kmax = 1e4;
  int nk = 200;
  double vanishing = 0.05;  // omega_inf below this fraction of omega_0 flags the acoustic band as vanishing
};

struct ChecksConfig {
  int states = 1000;
  int convexitySamples = 50;
};

struct SimulateConfig {
  std::string scenario = "plane_wave";
  std::string branch = "shear_acoustic";
  int N = 2000;
  double L = 1.0;
  double k = 1.0;
  double amplitude = 1e-6;
  double periods = 0.05;
  int samples = 10;
  double cfl = 0.45;
  std::string reconstruction = "muscl_minmod";
  std::string sourceScheme = "midpoint_split";
  bool sources = true;
  double tEnd = 0.0;  // 0: one crossing of the domain at the macroscopic sound speed
  double omega = 2.91e4;
  double dx = 5e-3;
  bool snapshot = false;
  std::string initial;  // CSV with x and the 39 conservative fields
};

struct RunConfig {
  std::string command;
  MaterialParams params;
  std::string alpha = "100";
  std::string beta = "100";
  std::string baseline = "raw";
  std::string out = "out";
  std::uint64_t seed = 1;
  DispersionConfig dispersion;
  SweepBetaConfig sweepBeta;
  ChecksConfig checks;
  SimulateConfig simulate;

  BaselineMode mode() const { return parse_baseline(baseline); }

  // Resolve the string-valued fields and check every parameter.
  void resolve() {
    params.alpha = Relaxation::parse(alpha);
    params.beta = Relaxation::parse(beta);
    parse_baseline(baseline);
    params.validate();
  }

  // Canonical key = value text of everything that influences the outputs of
  // the active command; its hash tags every artifact.
  std::string canonical() const {
    std::string s;
    auto kv = [&](const char* k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
    auto kd = [&](const char* k, double v) { kv(k, io::num(v)); };
    kv("command", command);
    kd("rho0", params.rho0);
    kd("C0", params.C0);
    kd("Cs", params.Cs);
    kd("c0", params.c0);
    kd("cs", params.cs);
    kd("Gamma", params.Gamma);
    kd("gamma", params.gamma);
    kd("epsilon", params.epsilon);
    kd("mu", params.mu);
    kd("ell", params.ell);
    kv("alpha", params.alpha.str());
    kv("beta", params.beta.str());
    kv("baseline", baseline);
    kv("seed", std::to_string(seed));
    if (command == "dispersion") {
      s += "[dispersion]\n";
      kd("kmin", dispersion.kmin);
      kd("kmax", dispersion.kmax);
      kv("nk", std::to_string(dispersion.nk));
      kv("svg", dispersion.svg ? "true" : "false");
      kd("gap_resolution", dispersion.gapResolution);
    } else if (command == "sweep-beta") {
      s += "[sweep-beta]\n";
      kd("beta_min", sweepBeta.betaMin);
      kd("beta_max", sweepBeta.betaMax);
      kv("n", std::to_string(sweepBeta.n));
      kd("kmin", sweepBeta.kmin);
      kd("kmax", sweepBeta.kmax);
      kv("nk", std::to_string(sweepBeta.nk));
      kd("vanishing", sweepBeta.vanishing);
    } else if (command == "checks") {
      s += "[checks]\n";
      kv("states", std::to_string(checks.states));
      kv("convexity_samples", std::to_string(checks.convexitySamples));
    } else if (command == "simulate") {
      const SimulateConfig& c = simulate;
      s += "[simulate]\n";
      kv("scenario", c.scenario);
      kv("branch", c.branch);
      kv("N", std::to_string(c.N));
      kd("L", c.L);
      kd("k", c.k);
      kd("amplitude", c.amplitude);
      kd("periods", c.periods);
      kv("samples", std::to_string(c.samples));
      kd("cfl", c.cfl);
      kv("reconstruction", c.reconstruction);
      kv("source_scheme", c.sourceScheme);
      kv("sources", c.sources ? "true" : "false");
      kd("t_end", c.tEnd);
      kd("omega", c.omega);
      kd("dx", c.dx);
      kv("snapshot", c.snapshot ? "true" : "false");
      kv("initial", c.initial);
    }
    return s;
  }

  std::string hash() const { return io::hash_hex(canonical()); }
  std::string header() const { return io::header_line(hash(), mode()); }
};

// ---- commands -----------------------------------------------------------

namespace detail {

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.out) / name;
}

inline std::string cutoff_lines(const CutoffSet& c, const MaterialParams& p) {
  std::string s;
  s += fmt::format("omega_inf = {}\n", io::num(c.omegaInf));
  s += fmt::format("omega_0 = {}\n", io::num(c.omega0));
  s += fmt::format("omega_s = {}{}\n", io::num(c.omegaS), c.omegaSPresent ? "" : " (absent)");
  s += fmt::format("omega_l = {}\n", io::num(c.omegaL));
  s += fmt::format("V_s = {}\n", io::num(c.Vs));
  s += fmt::format("V_l = {}\n", io::num(c.Vl));
  s += fmt::format("c_inf = {}\n", io::num(p.c_inf()));
  s += fmt::format("C_l = {}\n", io::num(p.C_l()));
  s += fmt::format("beta_crit = {}\n", c.betaCrit ? io::num(*c.betaCrit) : std::string("none"));
  s += fmt::format("gap_open = {}\n", c.gapOpen() ? "true" : "false");
  return s;
}

inline std::string gap_statement(const BandGapReport& g, double resolution) {
  if (g.gaps.empty()) return "no band gap\n";
  if (g.total_width() < resolution)
    return fmt::format("gap width below resolution threshold ({} rad/s < {} rad/s)\n", io::num(g.total_width()),
                       io::num(resolution));
  std::string s;
  for (const BandGap& b : g.gaps)
    s += fmt::format("band gap: {} .. {} rad/s, width {} rad/s{}\n", io::num(b.lo), io::num(b.hi), io::num(b.width()),
                     g.complete ? "" : " (partial)");
  s += fmt::format("total gap width = {} rad/s\n", io::num(g.total_width()));
  return s;
}

// Distinct positive eigenvalues of the transport limit.
inline std::vector<double> asymptotic_speeds(const LinearSystem& ls) {
  std::vector<double> v;
  const EigenSolveResult r = dispersion_at_k(ls, 1e9);
  for (const cplx& z : r.lambdas)
    if (z.real() > 1e-6 * r.maxAbs) v.push_back(z.real());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-6 * x) out.push_back(x);
  return out;
}

}  // namespace detail

inline int cmd_cutoffs(const RunConfig& c, std::ostream& out) {
  const CutoffSet cs = cutoffs(c.params);
  const std::string body = detail::cutoff_lines(cs, c.params);
  io::write_file(detail::out_path(c, "cutoffs.txt"), c.header() + body);
  out << body;
  return kOk;
}

inline int cmd_dispersion(const RunConfig& c, std::ostream& out) {
  const DispersionConfig& d = c.dispersion;
  if (!(d.kmin > 0.0 && d.kmax > d.kmin) || d.nk < 3) throw std::invalid_argument("dispersion needs 0 < kmin < kmax and nk >= 3");
  const auto t0 = std::chrono::steady_clock::now();
  const LinearSystem ls = linearize(c.params, c.mode());
  const DispersionSolver solver(ls);
  const SweepResult sw = sweep(solver, log_grid(d.kmin, d.kmax, d.nk));
  const BandGapReport gaps = band_gaps(sw, &solver);
  const CutoffSet cs = cutoffs(c.params);

  std::string r = c.header();
  r += detail::gap_statement(gaps, d.gapResolution);
  r += "\n[cutoffs, closed form]\n" + detail::cutoff_lines(cs, c.params);
  r += "\n[asymptotic speeds at k = 1e9]\n";
  for (double v : detail::asymptotic_speeds(ls)) r += fmt::format("{}\n", io::num(v));
  r += "\n[spectrum structure]\n";
  r += fmt::format("zero eigenvalues per k: {} .. {}\n", sw.stats.zeroMin, sw.stats.zeroMax);
  r += fmt::format("max |Im lambda| / max |lambda| = {}\n", io::num(sw.stats.maxImagRel));
  r += fmt::format("+/- symmetry error = {}\n", io::num(sw.stats.symmetryError));
  for (const auto& [sector, n] : sw.stats.positiveRoots) r += fmt::format("sector {}: {} positive roots\n", sector, n);
  r += "\n[branches]\n";
  for (const Branch& b : sw.branches)
    r += fmt::format("{} {} {} {} cutoff={} omega_range={}..{}{}\n", b.id, b.sector, to_string(b.modeClass),
                     to_string(b.kind), io::num(b.cutoff), io::num(b.omega_min()), io::num(b.omega_max()),
                     b.unresolved ? " unresolved-crossing" : "");
  io::write_file(detail::out_path(c, "bandgap.txt"), r);
  io::write_file(detail::out_path(c, "branches.csv"), c.header() + io::branches_csv(sw));
  if (d.svg) {
    const io::DispersionFigures f = io::dispersion_figures(sw, gaps, 1.2 * c.params.c_inf());
    io::write_file(detail::out_path(c, "omega_k.svg"), f.omegaK);
    io::write_file(detail::out_path(c, "phase_velocity.svg"), f.phaseVelocity);
    io::write_file(detail::out_path(c, "group_velocity.svg"), f.groupVelocity);
  }
  out << detail::gap_statement(gaps, d.gapResolution);
  out << fmt::format("{} branches, {} k-points, {:.2f} s\n", sw.branches.size(), sw.k.size(),
                     std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return kOk;
}

inline int cmd_sweep_beta(const RunConfig& c, std::ostream& out) {
  const SweepBetaConfig& s = c.sweepBeta;
  if (!(s.betaMin > 0.0) || !(s.betaMax >= s.betaMin) || !std::isfinite(s.betaMax) || s.n < 1 ||
      (s.n > 1 && s.betaMax == s.betaMin))
    throw std::invalid_argument("sweep-beta needs 0 < beta_min < beta_max < inf and n >= 1");
  if (!(s.kmin > 0.0 && s.kmax > s.kmin) || s.nk < 3) throw std::invalid_argument("sweep-beta needs 0 < kmin < kmax and nk >= 3");
  const std::vector<double> grid = log_grid(s.kmin, s.kmax, s.nk);
  std::string csv = "beta,omega_inf,omega_0,omega_s,omega_l,gap_closed_form,gap_measured,acoustic_vanishing\n";
  std::vector<std::pair<double, double>> widths;
  int vanishing = 0;
  for (int i = 0; i < s.n; ++i) {
    const double beta = s.n == 1 ? s.betaMax : s.betaMax - (s.betaMax - s.betaMin) * i / (s.n - 1);
    MaterialParams p = c.params;
    p.beta = Relaxation::finite(beta);
    const CutoffSet cs = cutoffs(p);
    const LinearSystem ls = linearize(p, c.mode());
    const DispersionSolver solver(ls);
    const BandGapReport g = band_gaps(sweep(solver, grid), &solver);
    const bool vanish = cs.omegaInf < s.vanishing * cs.omega0;
    vanishing += vanish;
    widths.emplace_back(beta, g.total_width());
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", io::num(beta), io::num(cs.omegaInf), io::num(cs.omega0),
                       io::num(cs.omegaS), io::num(cs.omegaL), io::num(std::max(0.0, cs.omega0 - cs.omegaInf)),
                       io::num(g.total_width()), vanish ? "true" : "false");
  }
  std::sort(widths.begin(), widths.end());
  bool monotone = true;
  for (std::size_t i = 1; i < widths.size(); ++i)
    monotone = monotone && widths[i].second >= widths[i - 1].second - 1e-9 * std::max(1.0, widths[i].second);
  std::string summary = c.header();
  summary += fmt::format("points = {}\n", s.n);
  summary += fmt::format("gap width monotone in beta = {}\n", monotone ? "true" : "false");
  summary += fmt::format("acoustic band vanishing at {} points\n", vanishing);
  summary += fmt::format("gap at smallest beta = {} rad/s\n", io::num(widths.front().second));
  summary += fmt::format("gap at largest beta = {} rad/s\n", io::num(widths.back().second));
  io::write_file(detail::out_path(c, "sweep_beta.csv"), c.header() + csv);
  io::write_file(detail::out_path(c, "sweep_beta.txt"), summary);
  out << summary.substr(summary.find('\n') + 1);
  return kOk;
}

inline int cmd_checks(const RunConfig& c, std::ostream& out) {
  CheckOptions o;
  o.seed = c.seed;
  o.states = c.checks.states;
  o.convexitySamples = c.checks.convexitySamples;
  if (o.states < 1 || o.convexitySamples < 1) throw std::invalid_argument("checks need at least one sample");
  const std::vector<CheckResult> rs = run_identity_checks(c.params, c.mode(), o);
  std::string body;
  bool all = true;
  for (const CheckResult& r : rs) {
    all = all && r.passed;
    body += fmt::format("{} {} measured={} tolerance={} ({})\n", r.passed ? "PASS" : "FAIL", r.name, io::num(r.measured),
                        io::num(r.tolerance), r.detail);
  }
  io::write_file(detail::out_path(c, "checks.txt"), c.header() + body);
  out << body;
  return all ? kOk : kCheckFailed;
}

namespace detail {

inline std::string timeseries_csv(const EnergyAudit& a) {
  std::string s = "time,total_energy,total_momentum_x,total_momentum_y,total_momentum_z\n";
  for (std::size_t i = 0; i < a.times.size(); ++i)
    s += fmt::format("{},{},{},{},{}\n", io::num(a.times[i]), io::num(a.totalEnergy[i]), io::num(a.totalMomentum[i](0)),
                     io::num(a.totalMomentum[i](1)), io::num(a.totalMomentum[i](2)));
  return s;
}

inline std::string snapshot_csv(const Simulation& sim) {
  std::string s = "x";
  for (const std::string& n : field_names(false)) s += "," + n;
  s += "\n";
  for (int i = 0; i < sim.grid().N; ++i) {
    s += io::num(sim.grid().x(i));
    for (int n = 0; n < kNumFields; ++n) s += "," + io::num(sim.state()[i][n]);
    s += "\n";
  }
  return s;
}

// Reads the snapshot format back; lines starting with '#' and the column row
// are skipped.
inline Field read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read initial data '" + path + "'");
  Field f;
  std::string line;
  bool columns = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!columns) {
      columns = true;
      if (line.rfind("x,", 0) == 0) continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != kNumFields + 1)
      throw std::invalid_argument(fmt::format("initial data row has {} values, expected {}", vals.size(), kNumFields + 1));
    Vec39 q;
    for (int n = 0; n < kNumFields; ++n) q[n] = vals[n + 1];
    f.push_back(q);
  }
  return f;
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const SimulateConfig& s = c.simulate;
  const Model model(c.params, c.mode());
  SimConfig sc;
  sc.cfl = s.cfl;
  sc.reconstruction = parse_reconstruction(s.reconstruction);
  sc.sourceScheme = parse_source_scheme(s.sourceScheme);
  sc.sources = s.sources;
  sc.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::string report = c.header() + fmt::format("scenario = {}\n", s.scenario);

  if (s.scenario == "plane_wave") {
    ProbeOptions o;
    o.k = s.k;
    o.amplitude = s.amplitude;
    o.N = s.N;
    o.periods = s.periods;
    o.samples = s.samples;
    o.sim = sc;
    const ProbeBranch br = parse_probe_branch(s.branch);
    const ProbeResult r = plane_wave_probe(model, br, o);
    const CutoffSet cs = cutoffs(c.params);
    const double longWave = br == ProbeBranch::shear_acoustic ? cs.Vs : cs.Vl;
    report += fmt::format("branch = {}\n", to_string(br));
    report += fmt::format("k = {}\n", io::num(r.k));
    report += fmt::format("measured phase speed = {}\n", io::num(r.vMeasured));
    report += fmt::format("linear dispersion speed = {}\n", io::num(r.vLinear));
    report += fmt::format("long-wave closed form = {}\n", io::num(longWave));
    report += fmt::format("relative error vs dispersion = {}\n", io::num(r.relError));
    report += fmt::format("relative error vs closed form = {}\n", io::num(std::abs(r.vMeasured - longWave) / longWave));
    report += fmt::format("amplitude ratio = {}\n", io::num(r.amplitudeRatio));
    report += fmt::format("steps = {}\n", r.steps);
  } else if (s.scenario == "gap_forcing") {
    ForcingOptions o;
    o.omega = s.omega;
    o.N = s.N;
    o.dx = s.dx;
    o.sim = sc;
    const ForcingResult r = gap_forcing(model, o);
    report += fmt::format("omega = {}\n", io::num(r.omega));
    report += fmt::format("near amplitude = {}\n", io::num(r.nearAmplitude));
    report += fmt::format("far amplitude = {}\n", io::num(r.farAmplitude));
    report += fmt::format("far / near = {}\n", io::num(r.ratio));
    report += fmt::format("verdict = {}\n", r.evanescent ? "evanescent" : "propagating");
    report += fmt::format("steps = {}\n", r.steps);
    std::string csv = "x,amplitude\n";
    for (int i = 0; i < o.N; ++i) csv += fmt::format("{},{}\n", io::num((i + 0.5) * o.dx), io::num(r.amplitude[i]));
    io::write_file(detail::out_path(c, "forcing_profile.csv"), c.header() + csv);
  } else if (s.scenario == "equilibrium" || s.scenario == "smooth" || s.scenario == "file") {
    Field init;
    Grid1D g{s.N, s.L};
    if (s.scenario == "file") {
      if (s.initial.empty()) throw std::invalid_argument("scenario 'file' needs initial = <csv>");
      init = detail::read_snapshot(s.initial);
      g.N = static_cast<int>(init.size());
    }
    g.validate();
    if (s.scenario == "equilibrium") init = uniform_field(g, equilibrium_state(c.params));
    if (s.scenario == "smooth") init = smooth_field(model, g, s.amplitude);
    Simulation sim(model, g, sc, init);
    const double tEnd = s.tEnd > 0.0 ? s.tEnd : g.L / c.params.C_l();
    const EnergyAudit a = energy_audit(sim, tEnd, std::max(1, s.samples));
    double dev = 0.0;
    for (int i = 0; i < g.N; ++i) dev = std::max(dev, (sim.state()[i] - init[i]).cwiseAbs().maxCoeff());
    report += fmt::format("cells = {}\n", g.N);
    report += fmt::format("t_end = {}\n", io::num(tEnd));
    report += fmt::format("steps = {}\n", sim.steps());
    report += fmt::format("energy drift = {}\n", io::num(a.drift));
    report += fmt::format("max energy drift = {}\n", io::num(a.maxDrift));
    report += fmt::format("momentum drift = {}\n", io::num(a.momentumDrift));
    report += fmt::format("max state change = {}\n", io::num(dev));
    io::write_file(detail::out_path(c, "timeseries.csv"), c.header() + detail::timeseries_csv(a));
    if (s.snapshot) io::write_file(detail::out_path(c, "snapshot_final.csv"), c.header() + detail::snapshot_csv(sim));
  } else {
    throw std::invalid_argument("unknown scenario '" + s.scenario + "'");
  }
  io::write_file(detail::out_path(c, "simulate.txt"), report);
  out << report.substr(report.find('\n') + 1);
  out << fmt::format("runtime {:.2f} s\n", seconds());
  return kOk;
}

// ---- command line -------------------------------------------------------

inline void add_options(CLI::App& app, RunConfig& c) {
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI file with top-level parameters and one section per command");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.add_option("--alpha", c.alpha, "macro relaxation alpha (1/m) or inf");
  app.add_option("--beta", c.beta, "micro relaxation beta (1/m) or inf");
  app.add_option("--baseline", c.baseline, "energy baseline: raw or stress_free");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--seed", c.seed, "seed for every random sample");
  app.add_option("--rho0", c.params.rho0, "reference density (kg/m^3)");
  app.add_option("--C0", c.params.C0, "macro bulk speed (m/s)");
  app.add_option("--Cs", c.params.Cs, "macro shear speed (m/s)");
  app.add_option("--c0", c.params.c0, "micro bulk speed (m/s)");
  app.add_option("--cs", c.params.cs, "micro shear speed (m/s)");
  app.add_option("--Gamma", c.params.Gamma, "macro volumetric exponent");
  app.add_option("--gamma", c.params.gamma, "micro volumetric exponent");
  app.add_option("--epsilon", c.params.epsilon, "torsion inertia epsilon");
  app.add_option("--mu", c.params.mu, "torsion stiffness mu");
  app.add_option("--ell", c.params.ell, "microstructure length (m)");

  auto* d = app.add_subcommand("dispersion", "branches, band gaps and figures");
  d->add_option("--kmin", c.dispersion.kmin, "smallest wavenumber (1/m)");
  d->add_option("--kmax", c.dispersion.kmax, "largest wavenumber (1/m)");
  d->add_option("--nk", c.dispersion.nk, "log-spaced wavenumbers");
  d->add_option("--svg", c.dispersion.svg, "write SVG figures");
  d->add_option("--gap_resolution", c.dispersion.gapResolution, "narrowest gap reported as open (rad/s)");

  auto* s = app.add_subcommand("sweep-beta", "gap width against the micro relaxation beta");
  s->add_option("--beta_min", c.sweepBeta.betaMin, "smallest beta (1/m)");
  s->add_option("--beta_max", c.sweepBeta.betaMax, "largest beta (1/m)");
  s->add_option("--n", c.sweepBeta.n, "number of beta values");
  s->add_option("--kmin", c.sweepBeta.kmin, "smallest wavenumber (1/m)");
  s->add_option("--kmax", c.sweepBeta.kmax, "largest wavenumber (1/m)");
  s->add_option("--nk", c.sweepBeta.nk, "log-spaced wavenumbers per beta");
  s->add_option("--vanishing", c.sweepBeta.vanishing, "omega_inf / omega_0 below which the acoustic band vanishes");

  auto* k = app.add_subcommand("checks", "identity suite with measured residuals");
  k->add_option("--states", c.checks.states, "random states per identity");
  k->add_option("--convexity_samples", c.checks.convexitySamples, "parameter samples for the convexity verdict");

  SimulateConfig& m = c.simulate;
  auto* sim = app.add_subcommand("simulate", "1D finite-volume scenarios");
  sim->add_option("--scenario", m.scenario, "plane_wave, gap_forcing, equilibrium, smooth or file");
  sim->add_option("--branch", m.branch, "probe branch: shear_acoustic or longitudinal_acoustic");
  sim->add_option("--N", m.N, "cells");
  sim->add_option("--L", m.L, "domain length for equilibrium/smooth/file (m)");
  sim->add_option("--k", m.k, "probe wavenumber (1/m)");
  sim->add_option("--amplitude", m.amplitude, "perturbation amplitude");
  sim->add_option("--periods", m.periods, "probe duration in periods");
  sim->add_option("--samples", m.samples, "phase or audit samples");
  sim->add_option("--cfl", m.cfl, "Courant number");
  sim->add_option("--reconstruction", m.reconstruction, "first_order or muscl_minmod");
  sim->add_option("--source_scheme", m.sourceScheme, "explicit_split or midpoint_split");
  sim->add_option("--sources", m.sources, "apply relaxation sources");
  sim->add_option("--t_end", m.tEnd, "end time, 0 for one crossing (s)");
  sim->add_option("--omega", m.omega, "forcing frequency (rad/s)");
  sim->add_option("--dx", m.dx, "cell size for gap_forcing (m)");
  sim->add_option("--snapshot", m.snapshot, "write the final fields");
  sim->add_option("--initial", m.initial, "initial data CSV for scenario file");

  app.add_subcommand("cutoffs", "closed-form cutoff frequencies and speeds");
  app.require_subcommand(1);
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"torsionlab: dispersion and 1D simulation of a torsion-based microstructured solid"};
  app.name("torsionlab");
  add_options(app, c);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  c.command = app.get_subcommands().front()->get_name();
  try {
    c.resolve();
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    if (c.command == "cutoffs") return cmd_cutoffs(c, out);
    if (c.command == "dispersion") return cmd_dispersion(c, out);
    if (c.command == "sweep-beta") return cmd_sweep_beta(c, out);
    if (c.command == "checks") return cmd_checks(c, out);
    return cmd_simulate(c, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace tlab::cli
