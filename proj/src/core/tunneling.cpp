#include "core/tunneling.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace adiabench::tunnel {

double barrier_height_bohr(double z_eff, unsigned n1, unsigned n2) {
  if (n1 < 1 || n2 <= n1) {
    std::ostringstream os;
    os << "Bohr levels need n2 > n1 >= 1 (got n1=" << n1 << ", n2=" << n2 << ")";
    fail(Errc::ordering, os.str());
  }
  if (!(z_eff > 0.0)) fail(Errc::invalid_argument, "z_eff must be > 0");
  const double a = 1.0 / (static_cast<double>(n1) * n1);
  const double b = 1.0 / (static_cast<double>(n2) * n2);
  return kRydbergEv * z_eff * (a - b);
}

TunnelResult transmission(const TunnelBarrier& b) {
  if (!(b.barrier_height > 0.0)) fail(Errc::invalid_argument, "barrier height must be > 0");
  if (!(b.width >= 0.0)) fail(Errc::invalid_argument, "barrier width must be >= 0");
  if (!(b.mass > 0.0) || !(b.hbar > 0.0)) fail(Errc::invalid_argument, "mass and hbar must be > 0");
  if (!(b.particle_energy >= 0.0)) fail(Errc::invalid_argument, "particle energy must be >= 0");
  if (!(b.particle_energy < b.barrier_height)) {
    std::ostringstream os;
    os << "particle energy " << joule_to_ev(b.particle_energy) << " eV is not below the barrier "
       << joule_to_ev(b.barrier_height) << " eV";
    fail(Errc::above_barrier, os.str());
  }
  TunnelResult r;
  r.k2 = std::sqrt(2.0 * b.mass * (b.barrier_height - b.particle_energy)) / b.hbar;
  r.exponent = 2.0 * r.k2 * b.width;
  r.transmission = std::exp(-r.exponent);
  return r;
}

double average_electron_energy(double total_energy, double electron_count, double fraction) {
  if (!(electron_count > 0.0)) fail(Errc::division, "electron count must be > 0");
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(Errc::invalid_argument, "energy fraction must lie in (0, 1]");
  return joule_to_ev(total_energy) * fraction / electron_count;
}

}  // namespace adiabench::tunnel
