#pragma once

// Rectangular-barrier transmission T = exp(-2 k2 L) used as the escape
// probability by the optimizer.

namespace adiabench::tunnel {

inline constexpr double kJoulePerEv = 1.602176634e-19;
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kElectronMass = 9.1e-31;        // kg, the worked-example value
inline constexpr double kRydbergEv = 13.6;

constexpr double ev_to_joule(double ev) { return ev * kJoulePerEv; }
constexpr double joule_to_ev(double j) { return j / kJoulePerEv; }

struct TunnelBarrier {
  double barrier_height = 0;   // U, J
  double particle_energy = 0;  // E, J
  double width = 0;            // L, m
  double mass = kElectronMass;
  double hbar = kHbar;

  static TunnelBarrier from_ev(double u_ev, double e_ev, double width_m, double mass_kg = kElectronMass) {
    return {ev_to_joule(u_ev), ev_to_joule(e_ev), width_m, mass_kg, kHbar};
  }
};

struct TunnelResult {
  double k2 = 0;        // 1/m
  double exponent = 0;  // 2 k2 L
  double transmission = 0;
};

// Hydrogenic level spacing 13.6 * z_eff * (1/n1^2 - 1/n2^2), in eV.
double barrier_height_bohr(double z_eff, unsigned n1, unsigned n2);

// k2 = sqrt(2 m (U - E)) / hbar. Refuses E >= U.
TunnelResult transmission(const TunnelBarrier& b);

// Mean energy per electron in eV when `fraction` of total_energy (J) is
// shared evenly by `electron_count` electrons, e.g. 60 J over 1e20 electrons
// with fraction 0.20 -> 0.75 eV.
double average_electron_energy(double total_energy, double electron_count, double fraction = 1.0);

}  // namespace adiabench::tunnel
