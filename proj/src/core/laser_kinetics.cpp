#include "core/laser_kinetics.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace adiabench::laser {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "laser." << name << " must be finite and > 0 (got " << v << ")";
    fail(Errc::config, os.str());
  }
}

// Locates the half-maximum crossings of a stream of per-step output
// energies. Crossings are linearly interpolated between the bracketing
// samples; a pulse touching either end of the window is clipped there.
class HalfMaxTracker {
 public:
  HalfMaxTracker(double half, double dt) : half_(half), dt_(dt) {}

  void push(double t, double e) {
    if (e >= half_) {
      if (!have_left_) {
        have_left_ = true;
        left_ = have_prev_ ? prev_t_ + (half_ - prev_e_) / (e - prev_e_) * dt_ : t;
      }
      above_ = true;
      right_ = t;
    } else if (above_) {
      right_ = prev_t_ + (prev_e_ - half_) / (prev_e_ - e) * dt_;
      above_ = false;
    }
    prev_t_ = t;
    prev_e_ = e;
    have_prev_ = true;
  }

  double width() const { return have_left_ ? right_ - left_ : 0.0; }

 private:
  double half_;
  double dt_;
  bool have_prev_ = false;
  bool have_left_ = false;
  bool above_ = false;
  double prev_t_ = 0;
  double prev_e_ = 0;
  double left_ = 0;
  double right_ = 0;
};

struct PeakScan {
  double max_e = 0;
  double max_t = 0;
  double total = 0;
  bool seen = false;

  void push(double t, double e) {
    if (!seen || e > max_e) {
      max_e = e;
      max_t = t;
    }
    seen = true;
    total += e;
  }
};

PulseMetrics finish(const PeakScan& scan, double width, double dt) {
  PulseMetrics m;
  m.peak_power = scan.max_e / dt;
  m.peak_time = scan.max_t;
  m.fwhm_width = width;
  m.total_out_energy = scan.total;
  return m;
}

void require_pulse(const PeakScan& scan) {
  if (!scan.seen) fail(Errc::no_pulse, "pulse metrics need a non-empty trace");
  if (!(scan.max_e > 0.0)) fail(Errc::no_pulse, "output energy is zero everywhere; no pulse formed");
}

}  // namespace

void validate(const LaserConfig& cfg) {
  require_positive(cfg.c, "c");
  require_positive(cfg.lambda_pump, "lambda_pump");
  require_positive(cfg.lambda_laser, "lambda_laser");
  require_positive(cfg.beam_area, "beam_area");
  require_positive(cfg.cavity_len, "cavity_len");
  require_positive(cfg.gain_len, "gain_len");
  require_positive(cfg.sigma_se, "sigma_se");
  require_positive(cfg.dt, "dt");
  require_positive(cfg.eta1, "eta1");
  require_positive(cfg.h, "h");
  require_positive(cfg.e_in, "e_in");
  require_positive(cfg.pump_vol, "pump_vol");
  require_positive(cfg.inversion_factor, "inversion_factor");
  if (!(cfg.phi0 >= 0.0) || !std::isfinite(cfg.phi0)) fail(Errc::config, "laser.phi0 must be finite and >= 0");
  if (!(cfg.r1 > 0.0 && cfg.r1 < 1.0)) fail(Errc::config, "laser.r1 must lie in (0, 1)");
  if (!(cfg.r2 > 0.0 && cfg.r2 <= 1.0)) fail(Errc::config, "laser.r2 must lie in (0, 1]");
}

DerivedParams derive_params(const LaserConfig& cfg) {
  validate(cfg);
  if (!(cfg.r1 * cfg.r2 < 1.0)) fail(Errc::config, "r1*r2 >= 1 gives a non-positive cavity loss rate");

  DerivedParams d;
  d.eta3 = cfg.lambda_pump / cfg.lambda_laser;
  d.e_pump_photon = cfg.h * cfg.c / cfg.lambda_pump;
  d.e_laser_photon = cfg.h * cfg.c / cfg.lambda_laser;
  d.e_stored = cfg.eta1 * d.eta3 * cfg.e_in;
  d.n0 = (d.e_stored / d.e_pump_photon) * (1.0 / cfg.pump_vol) * (cfg.gain_len / cfg.cavity_len);
  // W_L = -(c / 2l') ln(r1 r2)
  d.loss_rate = (-cfg.c / (2.0 * cfg.cavity_len)) * std::log(cfg.r1 * cfg.r2);
  d.t_round = 2.0 * cfg.cavity_len / cfg.c;

  const double guard = cfg.dt * cfg.sigma_se * cfg.c * d.n0;
  if (!(guard < kStabilityLimit)) {
    std::ostringstream os;
    os << "dt*sigma_se*c*n0 = " << guard << " exceeds the stability limit " << kStabilityLimit;
    fail(Errc::config, os.str());
  }
  return d;
}

RateState euler_step(const RateState& s, const DerivedParams& d, const LaserConfig& cfg) {
  const double stim = s.n * cfg.sigma_se * cfg.c * s.phi;
  RateState next;
  next.n = s.n - cfg.inversion_factor * stim * cfg.dt;
  next.phi = s.phi + (stim - d.loss_rate * s.phi) * cfg.dt;
  next.t = s.t + cfg.dt;
  return next;
}

void integrate(const LaserConfig& cfg, const std::function<void(std::uint64_t, const PulseSample&)>& visit) {
  const DerivedParams d = derive_params(cfg);
  const double out_coupling = (1.0 - cfg.r1) * d.e_laser_photon * cfg.beam_area * cfg.c * cfg.dt;

  RateState s{0.0, d.n0, cfg.phi0};
  for (std::uint64_t i = 0; i < cfg.steps; ++i) {
    // t is recomputed from the index so long runs do not accumulate drift.
    s.t = static_cast<double>(i) * cfg.dt;
    visit(i, PulseSample{s.t, s.n, s.phi, s.phi * out_coupling, cfg.sigma_se * s.n});
    s = euler_step(s, d, cfg);
    if (!std::isfinite(s.n) || !std::isfinite(s.phi) || s.phi < 0.0 || s.n < 0.0) {
      std::ostringstream os;
      os << "rate equations became unstable at step " << i + 1 << " (n=" << s.n << ", phi=" << s.phi << ")";
      fail(Errc::numeric_instability, os.str());
    }
  }
}

PulseTrace simulate(const LaserConfig& cfg) {
  PulseTrace trace;
  trace.dt = cfg.dt;
  trace.samples.reserve(cfg.steps);
  integrate(cfg, [&](std::uint64_t, const PulseSample& s) { trace.samples.push_back(s); });
  return trace;
}

PulseMetrics pulse_metrics(const PulseTrace& trace) {
  PeakScan scan;
  for (const auto& s : trace.samples) scan.push(s.t, s.e_out);
  require_pulse(scan);
  HalfMaxTracker half(0.5 * scan.max_e, trace.dt);
  for (const auto& s : trace.samples) half.push(s.t, s.e_out);
  return finish(scan, half.width(), trace.dt);
}

PulseMetrics simulate_metrics(const LaserConfig& cfg) {
  PeakScan scan;
  integrate(cfg, [&](std::uint64_t, const PulseSample& s) { scan.push(s.t, s.e_out); });
  require_pulse(scan);
  HalfMaxTracker half(0.5 * scan.max_e, cfg.dt);
  integrate(cfg, [&](std::uint64_t, const PulseSample& s) { half.push(s.t, s.e_out); });
  return finish(scan, half.width(), cfg.dt);
}

namespace {

std::vector<SweepRow> run_rows(std::span<const double> xs, const std::function<LaserConfig(double)>& make) {
  std::vector<SweepRow> rows(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    rows[i].x = xs[i];
    try {
      if (!(xs[i] > 0.0)) fail(Errc::invalid_argument, "sweep values must be > 0");
      rows[i].metrics = simulate_metrics(make(xs[i]));
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_energy(const LaserConfig& cfg, std::span<const double> energies) {
  return run_rows(energies, [&](double e) {
    LaserConfig c = cfg;
    c.e_in = e;
    return c;
  });
}

std::vector<SweepRow> sweep_timestep(const LaserConfig& cfg, std::span<const double> dts) {
  const double window = static_cast<double>(cfg.steps) * cfg.dt;
  return run_rows(dts, [&](double dt) {
    LaserConfig c = cfg;
    c.dt = dt;
    c.steps = static_cast<std::uint64_t>(std::llround(window / dt));
    return c;
  });
}

}  // namespace adiabench::laser
