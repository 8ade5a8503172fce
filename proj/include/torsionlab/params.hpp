#pragma once

#include "tensor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace tlab {

// Relaxation coefficient that may be switched off entirely. An infinite value
// removes the corresponding 1/alpha or 1/beta terms structurally.
class Relaxation {
 public:
  Relaxation() = default;
  static Relaxation finite(double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(fmt::format("relaxation parameter must be positive, got {}", v));
    Relaxation r;
    r.value_ = v;
    r.infinite_ = false;
    return r;
  }
  static Relaxation infinite() {
    Relaxation r;
    r.infinite_ = true;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }
  static Relaxation parse(const std::string& s) {
    if (s == "inf" || s == "infinite" || s == "Inf" || s == "INF") return infinite();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse relaxation parameter '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
    return finite(v);
  }

  bool is_infinite() const { return infinite_; }
  double value() const { return value_; }
  double inverse() const { return infinite_ ? 0.0 : 1.0 / value_; }
  std::string str() const { return infinite_ ? std::string("inf") : fmt::format("{:.17g}", value_); }

  friend bool operator==(const Relaxation& a, const Relaxation& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  double value_ = 100.0;
  bool infinite_ = false;
};

struct MaterialParams {
  double rho0 = 2000.0;
  double C0 = 600.0;
  double Cs = 600.0;
  double c0 = 100.0;
  double cs = 100.0;
  // Only Gamma = gamma = 3 reproduces the closed-form cutoffs of the raw linearization.
  double Gamma = 3.0;
  double gamma = 3.0;
  double epsilon = 2e-5;
  double mu = 0.5;
  Relaxation alpha = Relaxation::finite(100.0);
  Relaxation beta = Relaxation::finite(100.0);
  double ell = 2e-3;  // not in the equations; sets the scale of synthetic torsion data

  double c_inf() const { return 1.0 / std::sqrt(epsilon * mu); }
  double C_l() const { return std::sqrt(C0 * C0 + 4.0 * Cs * Cs / 3.0); }

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(fmt::format("{} must be positive and finite, got {}", name, v));
    };
    pos(rho0, "rho0");
    pos(C0, "C0");
    pos(Cs, "Cs");
    pos(c0, "c0");
    pos(cs, "cs");
    pos(epsilon, "epsilon");
    pos(mu, "mu");
    pos(ell, "ell");
    if (!(Gamma > 1.0)) throw std::invalid_argument(fmt::format("Gamma must exceed 1, got {}", Gamma));
    if (!(gamma > 1.0)) throw std::invalid_argument(fmt::format("gamma must exceed 1, got {}", gamma));
  }

  static MaterialParams reference() { return MaterialParams{}; }
};

enum class BaselineMode { raw, stress_free };

inline const char* to_string(BaselineMode m) { return m == BaselineMode::raw ? "raw" : "stress_free"; }

inline BaselineMode parse_baseline(const std::string& s) {
  if (s == "raw") return BaselineMode::raw;
  if (s == "stress_free") return BaselineMode::stress_free;
  throw std::invalid_argument("unknown baseline mode '" + s + "'");
}

}  // namespace tlab
