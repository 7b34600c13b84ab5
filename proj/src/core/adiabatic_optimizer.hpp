#pragma once

// Five-phase global optimizer over discrete energy landscapes:
//   reduction    landscape -> EnergyModel (explicit table or Ising couplings)
//   optimization choose the working gap from (gap, transition time, stability)
//   mapping      gap and drive energy -> annealing schedule with tau >= E/g^2
//   evolution    greedy basin mining plus a seeded walk whose uphill moves are
//                accepted with the barrier transmission probability
//   simulation   instrumented runs (wall time, selection comparisons)

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "core/tunneling.hpp"

namespace adiabench::opt {

using ConfigId = std::uint64_t;

struct Coupling {
  unsigned i = 0;
  unsigned j = 0;
  double value = 0;
};

// Couplings form a sparse J_ij map and must list both (i, j) and (j, i).
struct IsingSpec {
  unsigned site_count = 0;
  std::vector<Coupling> couplings;
  double transverse_field = 0;
};

using Landscape = std::variant<std::vector<double>, IsingSpec>;

enum class ModelKind { explicit_table, ising };

struct Neighbor {
  ConfigId id = 0;
  double hops = 1;  // distance used as the barrier width multiplier
};

class EnergyModel {
 public:
  static EnergyModel from_table(std::vector<double> energies);
  static EnergyModel from_ising(const IsingSpec& spec);

  ModelKind kind() const { return kind_; }
  std::uint64_t config_count() const;
  unsigned site_count() const { return sites_; }
  double transverse_field() const { return gamma_; }
  std::span<const double> table() const { return table_; }

  double energy(ConfigId id) const;
  // Neighbors in ascending id order: i-1, i+1 for tables, single spin flips
  // for Ising models.
  void neighbors(ConfigId id, std::vector<Neighbor>& out) const;

  // Spin of site i in configuration id: bit clear -> +1 (up), set -> -1.
  static int spin(ConfigId id, unsigned site) { return ((id >> site) & 1u) ? -1 : 1; }

 private:
  struct Bond {
    unsigned other;
    double value;
  };

  ModelKind kind_ = ModelKind::explicit_table;
  std::vector<double> table_;
  unsigned sites_ = 0;
  double gamma_ = 0;
  std::vector<std::vector<Bond>> bonds_;  // per site, only partners with larger index
};

inline constexpr unsigned kMaxIsingSites = 63;

EnergyModel reduce(std::vector<double> table);
EnergyModel reduce(const IsingSpec& spec);
EnergyModel reduce(const Landscape& landscape);

struct GapCandidate {
  double gap = 0;
  double transition_time = 0;
  double stability_score = 0;
};

struct WorkingGap {
  std::vector<GapCandidate> candidates;
  std::size_t chosen = 0;

  double gap() const { return candidates.at(chosen).gap; }
};

// Keeps candidates with transition_time >= min_transition and
// stability_score >= min_stability, then picks the smallest gap; ties go to
// the larger stability score, then to input order.
WorkingGap select_gap(std::span<const GapCandidate> candidates, double min_transition, double min_stability);

struct RampPoint {
  std::uint64_t step = 0;
  double drive = 0;
};

// Linear drive from 0 up to drive_energy over total_time, discretized into
// `steps` walk steps.
struct AdiabaticSchedule {
  double total_time = 0;
  double gap = 0;
  double drive_energy = 0;
  std::uint64_t steps = 0;

  double drive_at_time(double t) const;
  // Drive applied during step s (0-based); the last step runs at full drive.
  double drive_at_step(std::uint64_t s) const;
  std::vector<RampPoint> ramp(std::size_t samples) const;
};

// tau * g^2 >= E, evaluated exactly as written here.
bool admissible(const AdiabaticSchedule& s);

inline constexpr double kDefaultStepsPerTime = 1000.0;

AdiabaticSchedule map_schedule(double gap, double drive_energy, double safety,
                               double steps_per_time = kDefaultStepsPerTime);
AdiabaticSchedule map_schedule(const WorkingGap& gap, double drive_energy, double safety,
                               double steps_per_time = kDefaultStepsPerTime);

struct Candidate {
  ConfigId id = 0;
  double energy = 0;

  bool operator==(const Candidate&) const = default;
};

struct CandidateOptions {
  std::uint32_t restarts = 32;  // Ising hill-climb seeds
  std::uint64_t seed = 0;
};

// Steepest descent; ties go to the lowest id.
ConfigId greedy_descent(const EnergyModel& model, ConfigId start);

// Greedy basin mining. Tables: every index with no strictly lower neighbor.
// Ising: descents from `restarts` seeded random configurations. The result is
// deduplicated and sorted by (energy, id).
std::vector<Candidate> enumerate_candidates(const EnergyModel& model, const CandidateOptions& opts = {});

struct GroundSelection {
  std::size_t ground_count = 0;  // size of the lowest-energy block
  std::uint64_t comparisons = 0;
};

// Binary search for the end of the ground-state block of a sorted candidate
// list. Costs at most ceil(log2 k) + 1 energy comparisons.
GroundSelection select_ground_states(std::span<const Candidate> sorted);

std::uint64_t selection_bound(std::uint64_t k);

// Maps an uphill move of size delta_e (model energy units) across `hops`
// neighbor steps onto a rectangular barrier: U - E = delta_e * energy_scale_ev,
// L = hops * length_scale_m.
struct BarrierMapping {
  double energy_scale_ev = 0.1;
  double length_scale_m = 0.5e-9;
  double particle_energy_ev = 0.75;
  double mass_kg = tunnel::kElectronMass;

  tunnel::TunnelBarrier operator()(double delta_e, double hops) const;
};

using BarrierMap = std::function<tunnel::TunnelBarrier(double delta_e, double hops)>;

struct OptimizerReport {
  ConfigId best_id = 0;
  double best_energy = 0;
  std::uint64_t visited_count = 0;
  std::uint64_t comparison_count = 0;
  std::uint64_t escape_count = 0;
  std::uint64_t candidate_count = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> phase_timings;  // seconds
};

struct EvolveOptions {
  // Walk from greedy_descent(start) instead of the best mined candidate.
  std::optional<ConfigId> start;
  // Include the mined candidate list in the final minimum.
  bool merge_candidates = true;
  CandidateOptions candidates;  // seed is overridden by the run seed
};

// Greedy-only baseline: the incumbent evolve() starts from.
OptimizerReport greedy(const EnergyModel& model, std::uint64_t seed, const EvolveOptions& opts = {});

OptimizerReport evolve(const EnergyModel& model, const AdiabaticSchedule& schedule, const BarrierMap& barrier,
                       std::uint64_t seed, const EvolveOptions& opts = {});

struct PipelineOptions {
  std::vector<GapCandidate> gaps{{1.0, 1.0, 1.0}};
  double min_transition = 0;
  double min_stability = 0;
  double drive_energy = 1.0;
  double safety = 1.0;
  double steps_per_time = kDefaultStepsPerTime;
  BarrierMapping barrier;
  CandidateOptions candidates;
};

// All five phases on one landscape; phase_timings holds reduction,
// optimization, mapping, evolution and simulation (whole run).
OptimizerReport run_pipeline(const Landscape& landscape, const PipelineOptions& opts, std::uint64_t seed);

struct ScalingRow {
  std::uint64_t n = 0;
  double mean_time_s = 0;
  double mean_comparisons = 0;
  double mean_candidates = 0;
  std::uint32_t trials = 0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::uint64_t runs = 0;
  std::uint64_t bound_violations = 0;  // runs with comparisons > ceil(log2 k) + 1
};

// Random uniform [0, 1) tables of each size, seeded per (seed, n, trial).
std::vector<double> random_table(std::uint64_t n, std::uint64_t seed);

// Symmetric couplings uniform in [-1, 1] on every pair, seeded.
IsingSpec random_ising(unsigned sites, std::uint64_t seed, double transverse_field = 0.0);

ScalingResult scaling_experiment(std::span<const std::uint64_t> sizes, std::uint32_t trials, std::uint64_t seed,
                                 const PipelineOptions& opts = {});

// Least-squares fit y = a + b ln(x); returns the coefficient of determination.
double log_fit_r2(std::span<const double> x, std::span<const double> y);

}  // namespace adiabench::opt
