#include "core/adiabatic_optimizer.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include "core/error.hpp"

namespace adiabench::opt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

// mt19937_64's output sequence is fixed by the standard; the conversions
// below are too, unlike std::uniform_*_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.energy < b.energy || (a.energy == b.energy && a.id < b.id);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

// ---------------------------------------------------------------- model

EnergyModel EnergyModel::from_table(std::vector<double> energies) {
  if (energies.empty()) fail(Errc::validation, "energy table is empty");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i])) {
      std::ostringstream os;
      os << "energy table entry " << i << " is not finite";
      fail(Errc::validation, os.str());
    }
  }
  EnergyModel m;
  m.kind_ = ModelKind::explicit_table;
  m.table_ = std::move(energies);
  return m;
}

EnergyModel EnergyModel::from_ising(const IsingSpec& spec) {
  if (spec.site_count == 0) fail(Errc::validation, "ising model needs at least one site");
  if (spec.site_count > kMaxIsingSites) fail(Errc::validation, "ising models are limited to 63 sites");
  if (!(spec.transverse_field >= 0.0)) fail(Errc::validation, "transverse field must be >= 0");

  std::map<std::pair<unsigned, unsigned>, double> j;
  for (const auto& c : spec.couplings) {
    if (c.i >= spec.site_count || c.j >= spec.site_count) fail(Errc::validation, "coupling index out of range");
    if (!std::isfinite(c.value)) fail(Errc::validation, "coupling value is not finite");
    if (c.i == c.j) {
      if (c.value != 0.0) fail(Errc::validation, "coupling map has a nonzero diagonal entry");
      continue;
    }
    auto [it, inserted] = j.emplace(std::pair{c.i, c.j}, c.value);
    if (!inserted && it->second != c.value) fail(Errc::validation, "coupling listed twice with different values");
  }
  EnergyModel m;
  m.kind_ = ModelKind::ising;
  m.sites_ = spec.site_count;
  m.gamma_ = spec.transverse_field;
  m.bonds_.resize(spec.site_count);
  for (const auto& [key, value] : j) {
    const auto mirror = j.find({key.second, key.first});
    if (mirror == j.end() || mirror->second != value) {
      std::ostringstream os;
      os << "coupling map is not symmetric at (" << key.first << ", " << key.second << ")";
      fail(Errc::validation, os.str());
    }
    if (key.first < key.second && value != 0.0) m.bonds_[key.first].push_back({key.second, value});
  }
  return m;
}

std::uint64_t EnergyModel::config_count() const {
  if (kind_ == ModelKind::explicit_table) return table_.size();
  return std::uint64_t{1} << sites_;
}

double EnergyModel::energy(ConfigId id) const {
  if (kind_ == ModelKind::explicit_table) return table_.at(id);
  double e = 0.0;
  for (unsigned i = 0; i < sites_; ++i) {
    const int si = spin(id, i);
    for (const auto& b : bonds_[i]) e -= b.value * si * spin(id, b.other);
  }
  return e;
}

void EnergyModel::neighbors(ConfigId id, std::vector<Neighbor>& out) const {
  out.clear();
  if (kind_ == ModelKind::explicit_table) {
    if (id > 0) out.push_back({id - 1, 1.0});
    if (id + 1 < table_.size()) out.push_back({id + 1, 1.0});
    return;
  }
  // Ascending id order: flipping a set bit lowers the id.
  for (unsigned i = sites_; i-- > 0;) {
    const ConfigId flipped = id ^ (ConfigId{1} << i);
    if (flipped < id) out.push_back({flipped, 1.0});
  }
  for (unsigned i = 0; i < sites_; ++i) {
    const ConfigId flipped = id ^ (ConfigId{1} << i);
    if (flipped > id) out.push_back({flipped, 1.0});
  }
}

EnergyModel reduce(std::vector<double> table) { return EnergyModel::from_table(std::move(table)); }
EnergyModel reduce(const IsingSpec& spec) { return EnergyModel::from_ising(spec); }
EnergyModel reduce(const Landscape& landscape) {
  return std::visit([](const auto& l) { return reduce(l); }, landscape);
}

// ---------------------------------------------------------------- gap / schedule

WorkingGap select_gap(std::span<const GapCandidate> candidates, double min_transition, double min_stability) {
  if (candidates.empty()) fail(Errc::invalid_argument, "no gap candidates given");
  WorkingGap w;
  w.candidates.assign(candidates.begin(), candidates.end());
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!(c.transition_time >= min_transition) || !(c.stability_score >= min_stability)) continue;
    if (!pick) {
      pick = i;
      continue;
    }
    const auto& p = candidates[*pick];
    if (c.gap < p.gap || (c.gap == p.gap && c.stability_score > p.stability_score)) pick = i;
  }
  if (!pick) fail(Errc::no_admissible_gap, "no gap candidate meets the transition-time and stability thresholds");
  w.chosen = *pick;
  return w;
}

double AdiabaticSchedule::drive_at_time(double t) const {
  if (total_time <= 0.0) return drive_energy;
  return drive_energy * std::clamp(t / total_time, 0.0, 1.0);
}

double AdiabaticSchedule::drive_at_step(std::uint64_t s) const {
  if (steps == 0) return 0.0;
  return drive_energy * (static_cast<double>(std::min(s + 1, steps)) / static_cast<double>(steps));
}

std::vector<RampPoint> AdiabaticSchedule::ramp(std::size_t samples) const {
  std::vector<RampPoint> out;
  if (samples == 0 || steps == 0) return out;
  out.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const std::uint64_t s =
        samples == 1 ? steps - 1 : static_cast<std::uint64_t>((static_cast<double>(k) * (steps - 1)) / (samples - 1));
    out.push_back({s, drive_at_step(s)});
  }
  return out;
}

bool admissible(const AdiabaticSchedule& s) { return s.total_time * (s.gap * s.gap) >= s.drive_energy; }

AdiabaticSchedule map_schedule(double gap, double drive_energy, double safety, double steps_per_time) {
  if (!(gap > 0.0) || !std::isfinite(gap)) fail(Errc::degenerate_gap, "working gap must be > 0");
  if (!(drive_energy > 0.0) || !std::isfinite(drive_energy)) fail(Errc::invalid_argument, "drive energy must be > 0");
  if (!(safety >= 1.0) || !std::isfinite(safety)) fail(Errc::invalid_argument, "safety factor must be >= 1");
  if (!(steps_per_time > 0.0)) fail(Errc::invalid_argument, "steps per unit time must be > 0");

  AdiabaticSchedule s;
  s.gap = gap;
  s.drive_energy = drive_energy;
  s.total_time = safety * drive_energy / (gap * gap);
  // Rounding in the division can leave tau*g^2 one ulp short of E.
  while (!admissible(s)) s.total_time = std::nextafter(s.total_time, INFINITY);
  if (!std::isfinite(s.total_time)) fail(Errc::degenerate_gap, "gap too small: evolution time overflows");
  const double steps = std::ceil(s.total_time * steps_per_time);
  if (!(steps < 1e12)) fail(Errc::schedule, "schedule needs more than 1e12 steps; raise the gap or lower the drive");
  s.steps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(steps));
  return s;
}

AdiabaticSchedule map_schedule(const WorkingGap& gap, double drive_energy, double safety, double steps_per_time) {
  return map_schedule(gap.gap(), drive_energy, safety, steps_per_time);
}

// ---------------------------------------------------------------- mining

ConfigId greedy_descent(const EnergyModel& model, ConfigId start) {
  if (start >= model.config_count()) fail(Errc::invalid_argument, "start configuration out of range");
  std::vector<Neighbor> nbs;
  ConfigId cur = start;
  double e = model.energy(cur);
  for (;;) {
    model.neighbors(cur, nbs);
    ConfigId best = cur;
    double best_e = e;
    for (const auto& nb : nbs) {
      const double ne = model.energy(nb.id);
      if (ne < best_e) {
        best = nb.id;
        best_e = ne;
      }
    }
    if (best == cur) return cur;
    cur = best;
    e = best_e;
  }
}

std::vector<Candidate> enumerate_candidates(const EnergyModel& model, const CandidateOptions& opts) {
  std::vector<Candidate> out;
  if (model.kind() == ModelKind::explicit_table) {
    const auto t = model.table();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const bool left_ok = i == 0 || !(t[i - 1] < t[i]);
      const bool right_ok = i + 1 == t.size() || !(t[i + 1] < t[i]);
      if (left_ok && right_ok) out.push_back({i, t[i]});
    }
  } else {
    Rng rng(mix(opts.seed, 0xC0FFEE));
    const ConfigId mask = model.config_count() - 1;
    std::unordered_set<ConfigId> seen;
    for (std::uint32_t r = 0; r < std::max<std::uint32_t>(1, opts.restarts); ++r) {
      const ConfigId id = greedy_descent(model, rng.bits() & mask);
      if (seen.insert(id).second) out.push_back({id, model.energy(id)});
    }
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

GroundSelection select_ground_states(std::span<const Candidate> sorted) {
  GroundSelection g;
  if (sorted.empty()) return g;
  const double ground = sorted.front().energy;
  const auto end = std::upper_bound(sorted.begin(), sorted.end(), ground, [&](double value, const Candidate& c) {
    ++g.comparisons;
    return value < c.energy;
  });
  g.ground_count = static_cast<std::size_t>(end - sorted.begin());
  return g;
}

std::uint64_t selection_bound(std::uint64_t k) {
  if (k <= 1) return 1;
  return static_cast<std::uint64_t>(std::bit_width(k - 1)) + 1;  // ceil(log2 k) + 1
}

// ---------------------------------------------------------------- evolution

tunnel::TunnelBarrier BarrierMapping::operator()(double delta_e, double hops) const {
  return tunnel::TunnelBarrier::from_ev(particle_energy_ev + delta_e * energy_scale_ev, particle_energy_ev,
                                        hops * length_scale_m, mass_kg);
}

namespace {

struct Incumbent {
  Candidate start;
  std::vector<Candidate> candidates;
  std::uint64_t comparisons = 0;
};

Incumbent find_incumbent(const EnergyModel& model, std::uint64_t seed, const EvolveOptions& opts) {
  Incumbent inc;
  const bool need_candidates = opts.merge_candidates || !opts.start;
  if (need_candidates) {
    CandidateOptions co = opts.candidates;
    co.seed = seed;
    inc.candidates = enumerate_candidates(model, co);
    inc.comparisons = select_ground_states(inc.candidates).comparisons;
  }
  if (opts.start) {
    const ConfigId id = greedy_descent(model, *opts.start);
    inc.start = {id, model.energy(id)};
  } else {
    inc.start = inc.candidates.front();
  }
  return inc;
}

OptimizerReport finish_report(const Incumbent& inc, Candidate best, const EvolveOptions& opts, std::uint64_t seed) {
  if (opts.merge_candidates && !inc.candidates.empty() && better(inc.candidates.front(), best)) {
    best = inc.candidates.front();
  }
  OptimizerReport r;
  r.best_id = best.id;
  r.best_energy = best.energy;
  r.comparison_count = inc.comparisons;
  r.candidate_count = inc.candidates.size();
  r.seed = seed;
  return r;
}

}  // namespace

OptimizerReport greedy(const EnergyModel& model, std::uint64_t seed, const EvolveOptions& opts) {
  const Incumbent inc = find_incumbent(model, seed, opts);
  OptimizerReport r = finish_report(inc, inc.start, opts, seed);
  r.visited_count = 1;
  return r;
}

OptimizerReport evolve(const EnergyModel& model, const AdiabaticSchedule& schedule, const BarrierMap& barrier,
                       std::uint64_t seed, const EvolveOptions& opts) {
  if (!admissible(schedule) || !(schedule.gap > 0.0) || !(schedule.drive_energy >= 0.0)) {
    fail(Errc::schedule, "schedule violates tau * g^2 >= E");
  }
  const Incumbent inc = find_incumbent(model, seed, opts);

  Rng rng(mix(seed, 0xE7017E));
  std::unordered_set<ConfigId> visited{inc.start.id};
  std::vector<Neighbor> nbs;
  Candidate cur = inc.start;
  Candidate best = inc.start;
  std::uint64_t escapes = 0;

  for (std::uint64_t step = 0; step < schedule.steps; ++step) {
    model.neighbors(cur.id, nbs);
    if (nbs.empty()) break;
    const Neighbor nb = nbs[rng.below(nbs.size())];
    const double ne = model.energy(nb.id);
    const double delta = ne - cur.energy;
    // One uniform draw per step keeps the stream aligned across drive levels.
    const double u = rng.uniform();
    bool accept = delta < 0.0;
    if (!accept && schedule.drive_energy > 0.0) {
      const double level = schedule.drive_at_step(step) / schedule.drive_energy;
      const double t = delta > 0.0 ? tunnel::transmission(barrier(delta, nb.hops)).transmission : 1.0;
      accept = u < t * level;
      if (accept) ++escapes;
    }
    if (!accept) continue;
    cur = {nb.id, ne};
    visited.insert(cur.id);
    if (better(cur, best)) best = cur;
  }

  OptimizerReport r = finish_report(inc, best, opts, seed);
  r.visited_count = visited.size();
  r.escape_count = escapes;
  return r;
}

// ---------------------------------------------------------------- pipeline

OptimizerReport run_pipeline(const Landscape& landscape, const PipelineOptions& opts, std::uint64_t seed) {
  const auto t_all = Clock::now();

  auto t0 = Clock::now();
  const EnergyModel model = reduce(landscape);
  const double t_reduce = seconds_since(t0);

  t0 = Clock::now();
  const WorkingGap gap = select_gap(opts.gaps, opts.min_transition, opts.min_stability);
  const double t_opt = seconds_since(t0);

  t0 = Clock::now();
  const AdiabaticSchedule schedule = map_schedule(gap, opts.drive_energy, opts.safety, opts.steps_per_time);
  const double t_map = seconds_since(t0);

  t0 = Clock::now();
  EvolveOptions eo;
  eo.candidates = opts.candidates;
  OptimizerReport r = evolve(model, schedule, opts.barrier, seed, eo);
  const double t_evolve = seconds_since(t0);

  r.phase_timings = {{"reduction", t_reduce},
                     {"optimization", t_opt},
                     {"mapping", t_map},
                     {"evolution", t_evolve},
                     {"simulation", seconds_since(t_all)}};
  return r;
}

std::vector<double> random_table(std::uint64_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t(n);
  for (auto& v : t) v = rng.uniform();
  return t;
}

IsingSpec random_ising(unsigned sites, std::uint64_t seed, double transverse_field) {
  Rng rng(seed);
  IsingSpec spec;
  spec.site_count = sites;
  spec.transverse_field = transverse_field;
  for (unsigned i = 0; i < sites; ++i) {
    for (unsigned j = i + 1; j < sites; ++j) {
      const double v = 2.0 * rng.uniform() - 1.0;
      spec.couplings.push_back({i, j, v});
      spec.couplings.push_back({j, i, v});
    }
  }
  return spec;
}

ScalingResult scaling_experiment(std::span<const std::uint64_t> sizes, std::uint32_t trials, std::uint64_t seed,
                                 const PipelineOptions& opts) {
  if (trials == 0) fail(Errc::invalid_argument, "scaling experiment needs at least one trial");
  ScalingResult out;
  for (const std::uint64_t n : sizes) {
    if (n == 0) fail(Errc::invalid_argument, "scaling sizes must be positive");
    ScalingRow row;
    row.n = n;
    row.trials = trials;
    for (std::uint32_t t = 0; t < trials; ++t) {
      const std::uint64_t run_seed = mix(mix(seed, n), t);
      const OptimizerReport r = run_pipeline(random_table(n, run_seed), opts, run_seed);
      row.mean_time_s += r.phase_timings.at("simulation");
      row.mean_comparisons += static_cast<double>(r.comparison_count);
      row.mean_candidates += static_cast<double>(r.candidate_count);
      ++out.runs;
      if (r.comparison_count > selection_bound(r.candidate_count)) ++out.bound_violations;
    }
    row.mean_time_s /= trials;
    row.mean_comparisons /= trials;
    row.mean_candidates /= trials;
    out.rows.push_back(row);
  }
  return out;
}

double log_fit_r2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(Errc::invalid_argument, "log fit needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (syy == 0.0) return 1.0;
  if (sxx == 0.0) return 0.0;
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace adiabench::opt
