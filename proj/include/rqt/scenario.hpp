#pragma once

// Units, constants, species and potentials shared by the rest of the library.
//
// Internal units are MeV for energies, fm for lengths and s for times.
// Conversion to SI lengths happens only at output boundaries (see units::).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rqt/errors.hpp"

namespace rqt {

namespace units {
inline constexpr double meters_per_fm = 1e-15;

constexpr double fm_to_m(double fm) { return fm * meters_per_fm; }
constexpr double m_to_fm(double m) { return m / meters_per_fm; }
}  // namespace units

/// Fundamental constants in MeV / fm / s.
///
/// hbar and c are stored; hbar_c is their product so that every formula mixing
/// k = P/(hbar c) with omega = P^2/(hbar Q) stays exactly self-consistent.
struct Constants {
  double hbar = 6.582119569e-22;  // MeV s
  double c = 2.99792458e23;       // fm / s
  double hbar_c = 6.582119569e-22 * 2.99792458e23;  // MeV fm

  static Constants codata() { return Constants{}; }
};

struct Species {
  double rest_energy = 0.0;  // m0 c^2 in MeV

  static Species electron() { return Species{0.510998950}; }
  static Species photon() { return Species{0.0}; }

  bool is_photon() const { return rest_energy == 0.0; }
  double rest_energy_sq() const { return rest_energy * rest_energy; }
};

enum class PotentialKind { Constant, Linear };

/// V(x) = U0 (constant) or V(x) = g x (linear, g in MeV/fm).
class Potential {
 public:
  static Potential constant(double u0_mev) { return Potential{PotentialKind::Constant, u0_mev}; }
  static Potential linear(double g_mev_per_fm) { return Potential{PotentialKind::Linear, g_mev_per_fm}; }

  PotentialKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == PotentialKind::Constant; }
  /// U0 for a constant potential, g for a linear one.
  double parameter() const { return param_; }

  double value(double x) const { return is_constant() ? param_ : param_ * x; }
  double slope(double /*x*/) const { return is_constant() ? 0.0 : param_; }
  double curvature(double /*x*/) const { return 0.0; }

 private:
  Potential(PotentialKind kind, double p) : kind_(kind), param_(p) {}

  PotentialKind kind_;
  double param_;
};

struct Scenario {
  Constants constants = Constants::codata();
  Species species = Species::electron();
  Potential potential = Potential::constant(0.0);
  double energy = 2.0;       // total energy E in MeV, rest energy included
  double hbar_scale = 1.0;   // epsilon in (0, 1]; the effective hbar is epsilon * hbar

  static Scenario make(Species species, Potential potential, double energy, double hbar_scale = 1.0) {
    Scenario s;
    s.species = species;
    s.potential = potential;
    s.energy = energy;
    s.hbar_scale = hbar_scale;
    s.validate();
    return s;
  }

  void validate() const {
    if (!(energy > 0.0) || !std::isfinite(energy)) throw ConfigError("energy must be positive");
    if (!(hbar_scale > 0.0 && hbar_scale <= 1.0)) throw ConfigError("hbar_scale must lie in (0, 1]");
    if (!(species.rest_energy >= 0.0)) throw ConfigError("rest energy must be non-negative");
    if (!(constants.hbar > 0.0 && constants.c > 0.0 && constants.hbar_c > 0.0))
      throw ConfigError("constants must be positive");
  }

  double hbar() const { return hbar_scale * constants.hbar; }
  double hbar_c() const { return hbar_scale * constants.hbar_c; }
  double c() const { return constants.c; }
  double mass_sq() const { return species.rest_energy_sq(); }

  /// E - V(x).
  double available(double x) const { return energy - potential.value(x); }
};

enum class RegionClass { Allowed, Forbidden, TurningPoint };

inline double turning_tolerance(const Scenario& s) { return 1e-12 * s.energy * s.energy; }

/// Allowed iff (E-V)^2 > m0^2c^4, with a tolerance band of 1e-12 E^2 for turning points.
inline RegionClass classify_region(const Scenario& s, double x) {
  const double q = s.available(x);
  const double gap = q * q - s.mass_sq();
  if (std::abs(gap) <= turning_tolerance(s)) return RegionClass::TurningPoint;
  return gap > 0.0 ? RegionClass::Allowed : RegionClass::Forbidden;
}

/// (E-V) - m0^2c^4/(E-V), the bracketed velocity factor. Exactly zero at turning points.
inline double kinetic_factor(const Scenario& s, double x) {
  const double q = s.available(x);
  if (q == 0.0) throw SingularEnergyError("E - V(x) vanishes at x = " + std::to_string(x) + " fm");
  if (classify_region(s, x) == RegionClass::TurningPoint) return 0.0;
  return q - s.mass_sq() / q;
}

/// Points in (lo, hi) where the kinetic factor vanishes or E - V = 0, sorted.
/// Constant potentials have none.
inline std::vector<double> singular_points(const Scenario& s, double lo, double hi) {
  std::vector<double> out;
  if (s.potential.is_constant()) return out;
  const double g = s.potential.parameter();
  if (g == 0.0) return out;
  const double m = s.species.rest_energy;
  for (double level : {s.energy - m, s.energy, s.energy + m}) {
    const double x = level / g;
    if (x > lo && x < hi) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::string to_string(RegionClass r) {
  switch (r) {
    case RegionClass::Allowed: return "allowed";
    case RegionClass::Forbidden: return "forbidden";
    case RegionClass::TurningPoint: return "turning-point";
  }
  return "?";
}

}  // namespace rqt
