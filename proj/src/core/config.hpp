#pragma once

// Workbench configuration: flat `section.key = value` lines, `#` comments.
// Missing keys take module defaults; the laser defaults are the reference
// dye-laser constant block.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/adiabatic_optimizer.hpp"
#include "core/dmft.hpp"
#include "core/laser_kinetics.hpp"

namespace adiabench::config {

inline constexpr int kFormatVersion = 1;

// Input energies of the Table-3 sweep, J.
std::vector<double> table3_energies();
// Time steps of the Table-3 convergence study plus the 0.005 ps halving
// row, s.
std::vector<double> table3_timesteps();
// Data-point counts of the Table-4 scaling run.
std::vector<double> table4_sizes();

struct LaserSettings {
  laser::LaserConfig model;
  std::vector<double> energies = table3_energies();
  std::vector<double> dts = table3_timesteps();
  std::uint64_t trace_stride = 1000;

  bool operator==(const LaserSettings&) const = default;
};

struct TunnelSettings {
  double u_ev = 10.2;
  double e_ev = 0.75;
  double width_m = 0.5e-9;
  double mass_kg = tunnel::kElectronMass;
  double hbar = tunnel::kHbar;

  bool operator==(const TunnelSettings&) const = default;
};

struct OptimizeSettings {
  std::string model = "table";  // table | ising
  std::vector<double> table{5, 1, 4, 0, 6};
  std::uint64_t table_size = 0;  // > 0: seeded random table of this size instead
  std::uint64_t spins = 10;      // random seeded couplings when model = ising
  double transverse_field = 1.0;
  std::vector<double> gap_values{1.0};
  std::vector<double> gap_transition_times{1.0};
  std::vector<double> gap_stability{1.0};
  double min_transition = 0;
  double min_stability = 0;
  double drive_energy = 1.0;
  double safety = 1.0;
  double steps_per_time = opt::kDefaultStepsPerTime;
  double energy_scale_ev = 0.1;
  double length_scale_m = 0.5e-9;
  double particle_energy_ev = 0.75;
  std::uint64_t restarts = 32;
  std::vector<double> scaling_sizes = table4_sizes();
  std::uint64_t scaling_trials = 5;

  bool operator==(const OptimizeSettings&) const = default;
};

struct DmftSettings {
  double t = 1.0;
  double u = 1.0;
  double beta = 8.0;
  std::optional<double> mu;  // defaults to u/2
  double alpha = 1e-6;
  std::uint64_t max_iter = 200;
  double mixing = 0.7;
  std::uint64_t n_freq = 512;
  std::uint64_t n_tau = 0;

  bool operator==(const DmftSettings&) const = default;
};

struct RunConfig {
  int format_version = kFormatVersion;
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  LaserSettings laser;
  TunnelSettings tunnel;
  OptimizeSettings optimize;
  DmftSettings dmft;

  bool operator==(const RunConfig&) const = default;
};

// Throws Errc::config with a "line N: ..." diagnostic.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// One `key = value` assignment applied on top of cfg, same checks as the
// parser; cfg is untouched on failure.
void set_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Every key, in a fixed order, with round-trip exact values.
std::string serialize(const RunConfig& cfg);

// Cross-field checks (loss rate, Euler stability guard, gap lists...).
void validate(const RunConfig& cfg);

// Builders for the module inputs.
opt::PipelineOptions pipeline_options(const RunConfig& cfg);
opt::Landscape landscape(const RunConfig& cfg);
dmft::HubbardParams hubbard_params(const RunConfig& cfg);
dmft::LoopOptions loop_options(const RunConfig& cfg);
tunnel::TunnelBarrier tunnel_barrier(const RunConfig& cfg);

}  // namespace adiabench::config
