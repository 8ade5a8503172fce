#pragma once

#include "dispersion.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace tlab::io {

// Round-trippable decimal form used in every artifact.
inline std::string num(double x) { return fmt::format("{:.17g}", x); }

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hash_hex(const std::string& s) { return fmt::format("{:016x}", fnv1a64(s)); }

// First line of every output file.
inline std::string header_line(const std::string& configHash, BaselineMode mode) {
  return fmt::format("# torsionlab config_hash={} baseline={}\n", configHash, to_string(mode));
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string branches_csv(const SweepResult& sw) {
  std::string s = "k,branch_id,sector,mode_class,kind,omega,v_phase,v_group\n";
  for (const Branch& b : sw.branches)
    for (const BranchSample& p : b.samples)
      s += fmt::format("{},{},{},{},{},{},{},{}\n", num(p.k), b.id, b.sector, to_string(b.modeClass),
                       to_string(b.kind), num(p.omega), num(p.vPhase), num(p.vGroup));
  return s;
}

// ---- SVG ---------------------------------------------------------------

struct Series {
  std::vector<double> x, y;
  std::string color;
};

struct Band {
  double lo, hi;
};

struct PlotSpec {
  std::string title, xLabel, yLabel;
  bool logX = false;
  double xMin = 0, xMax = 1, yMin = 0, yMax = 1;
  std::vector<Band> xBands, yBands;  // shaded intervals along either axis
};

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
  return colors[i % 6];
}

inline std::string svg_plot(const PlotSpec& plot, const std::vector<Series>& series) {
  const double W = 640, H = 440, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  auto tx = [&](double x) {
    const double t = plot.logX ? (std::log10(x) - std::log10(plot.xMin)) / (std::log10(plot.xMax) - std::log10(plot.xMin))
                               : (x - plot.xMin) / (plot.xMax - plot.xMin);
    return left + pw * t;
  };
  auto ty = [&](double y) { return top + ph * (1.0 - (y - plot.yMin) / (plot.yMax - plot.yMin)); };
  auto clampY = [&](double y) { return std::clamp(y, plot.yMin, plot.yMax); };

  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n", W,
      H, W, H);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", W, H);
  for (const Band& b : plot.yBands) {
    const double y0 = ty(clampY(b.hi)), y1 = ty(clampY(b.lo));
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#cccccc\" opacity=\"0.6\"/>\n",
                     left, y0, pw, y1 - y0);
  }
  for (const Band& b : plot.xBands) {
    const double x0 = tx(std::clamp(b.lo, plot.xMin, plot.xMax)), x1 = tx(std::clamp(b.hi, plot.xMin, plot.xMax));
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#cccccc\" opacity=\"0.6\"/>\n",
                     x0, top, x1 - x0, ph);
  }
  s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                   left, top, pw, ph);
  for (const Series& ser : series) {
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (ser.x[i] < plot.xMin || ser.x[i] > plot.xMax || !std::isfinite(ser.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", tx(ser.x[i]), ty(clampY(ser.y[i])));
    }
    if (!pts.empty()) pts.pop_back();
    s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"{}\"/>\n", ser.color, pts);
  }
  // ticks: decades on a log axis, five divisions otherwise
  std::vector<double> xt;
  if (plot.logX)
    for (double d = std::ceil(std::log10(plot.xMin)); d <= std::floor(std::log10(plot.xMax)); d += 1.0)
      xt.push_back(std::pow(10.0, d));
  else
    for (int i = 0; i <= 5; ++i) xt.push_back(plot.xMin + (plot.xMax - plot.xMin) * i / 5.0);
  for (double x : xt)
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n", tx(x),
                     top + ph + 16, x);
  for (int i = 0; i <= 5; ++i) {
    const double y = plot.yMin + (plot.yMax - plot.yMin) * i / 5.0;
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n", left - 6,
                     ty(y) + 4, y);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                   plot.title);
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                   H - 18, plot.xLabel);
  s += fmt::format(
      "<text x=\"18\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}</text>\n",
      top + ph / 2, top + ph / 2, plot.yLabel);
  s += "</svg>\n";
  return s;
}

// Frequency-wavenumber, phase velocity and group velocity plots with the gaps
// shaded.
struct DispersionFigures {
  std::string omegaK, phaseVelocity, groupVelocity;
};

inline DispersionFigures dispersion_figures(const SweepResult& sw, const BandGapReport& gaps, double vMax) {
  std::vector<Band> bands;
  for (const BandGap& g : gaps.gaps) bands.push_back({g.lo, g.hi});
  // optical branches grow without bound; show the band up to beyond the top cutoff
  double wMax = 0.0;
  for (const Branch& b : sw.branches) wMax = std::max(wMax, b.kind == BranchKind::optical ? b.cutoff : 0.0);
  for (const BandGap& g : gaps.gaps) wMax = std::max(wMax, g.hi);
  wMax = wMax > 0.0 ? 1.5 * wMax : sw.omega_max();

  std::vector<Series> wk, vp, vg;
  for (std::size_t i = 0; i < sw.branches.size(); ++i) {
    const Branch& b = sw.branches[i];
    Series a{{}, {}, palette(i)}, c{{}, {}, palette(i)}, d{{}, {}, palette(i)};
    for (const BranchSample& p : b.samples) {
      a.x.push_back(p.k);
      a.y.push_back(p.omega);
      c.x.push_back(p.omega);
      c.y.push_back(p.vPhase);
      d.x.push_back(p.omega);
      d.y.push_back(p.vGroup);
    }
    wk.push_back(a);
    vp.push_back(c);
    vg.push_back(d);
  }
  DispersionFigures f;
  PlotSpec s1{"frequency vs wavenumber", "k (1/m)", "omega (rad/s)", true, sw.k.front(), sw.k.back(), 0.0, wMax, {}, bands};
  f.omegaK = svg_plot(s1, wk);
  PlotSpec s2{"phase velocity", "omega (rad/s)", "V_ph (m/s)", false, 0.0, wMax, 0.0, vMax, bands, {}};
  f.phaseVelocity = svg_plot(s2, vp);
  PlotSpec s3{"group velocity", "omega (rad/s)", "V_gr (m/s)", false, 0.0, wMax, -vMax, vMax, bands, {}};
  f.groupVelocity = svg_plot(s3, vg);
  return f;
}

}  // namespace tlab::io
