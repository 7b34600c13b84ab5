#pragma once

// Two-variable dye-laser rate equations (population inversion n, photon
// density phi) integrated with forward Euler, plus Q-switched pulse metrics.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adiabench::laser {

// Defaults are the rhodamine dye-laser constants. `steps` is 2e7 (a 200 ns window at dt = 0.01 ps) so the
// 140 uJ pulse, which peaks near 118 ns, is fully resolved.
struct LaserConfig {
  double c = 3.0e8;               // m/s
  double lambda_pump = 337e-9;    // m
  double lambda_laser = 582e-9;   // m
  double r1 = 0.08;               // output coupler
  double r2 = 0.99;               // end mirror
  double beam_area = 1e-6;        // m^2
  double cavity_len = 0.095;      // l', m
  double gain_len = 0.01;         // x, m
  double sigma_se = 3.5e-20;      // m^2
  double dt = 0.01e-12;           // s
  double eta1 = 0.34;
  double h = 6.626e-34;           // J s
  double e_in = 140e-6;           // J
  double pump_vol = 1e-8;         // m^3
  double phi0 = 9.7e-41;          // m^-3, seed photon density taken verbatim
  std::uint64_t steps = 20'000'000;
  double inversion_factor = 2.0;  // r

  bool operator==(const LaserConfig&) const = default;
};

struct DerivedParams {
  double eta3 = 0;
  double e_pump_photon = 0;   // J
  double e_laser_photon = 0;  // J
  double e_stored = 0;        // J
  double n0 = 0;              // m^-3
  double loss_rate = 0;       // s^-1
  double t_round = 0;         // s
};

struct RateState {
  double t = 0;
  double n = 0;
  double phi = 0;
};

struct PulseSample {
  double t = 0;
  double n = 0;
  double phi = 0;
  double e_out = 0;
  double g0 = 0;
};

struct PulseTrace {
  double dt = 0;
  std::vector<PulseSample> samples;
};

struct PulseMetrics {
  double peak_power = 0;  // W, max per-step output energy / dt
  double peak_time = 0;   // s
  double fwhm_width = 0;  // s
  double total_out_energy = 0;  // J
};

// Largest admissible dt * sigma_se * c * n0 (explicit-Euler blow-up guard).
inline constexpr double kStabilityLimit = 0.1;

// Checks the physical invariants of `cfg`; throws Errc::config.
void validate(const LaserConfig& cfg);

DerivedParams derive_params(const LaserConfig& cfg);

// One forward-Euler step of
//   dn/dt   = -r n sigma c phi
//   dphi/dt = n sigma c phi - W_L phi
// Both right-hand sides are evaluated at the old state.
RateState euler_step(const RateState& s, const DerivedParams& d, const LaserConfig& cfg);

// Drives the integrator and hands every sample to `visit` in order. This is
// the single integration loop; simulate() and the streaming metrics path
// both go through it.
void integrate(const LaserConfig& cfg, const std::function<void(std::uint64_t, const PulseSample&)>& visit);

PulseTrace simulate(const LaserConfig& cfg);

PulseMetrics pulse_metrics(const PulseTrace& trace);

// Same result as pulse_metrics(simulate(cfg)) without holding the trace:
// integrates twice, once for the maximum and once for the half-max crossings.
PulseMetrics simulate_metrics(const LaserConfig& cfg);

struct SweepRow {
  double x = 0;  // e_in (J) or dt (s)
  std::optional<PulseMetrics> metrics;
  std::string error;
};

std::vector<SweepRow> sweep_energy(const LaserConfig& cfg, std::span<const double> energies);

// Rows keep the simulated duration steps*dt of `cfg` fixed, so a finer dt
// runs proportionally more steps.
std::vector<SweepRow> sweep_timestep(const LaserConfig& cfg, std::span<const double> dts);

}  // namespace adiabench::laser
