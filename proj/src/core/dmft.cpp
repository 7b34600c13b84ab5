#include "core/dmft.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "core/error.hpp"

namespace adiabench::dmft {

namespace {

constexpr double kPi = std::numbers::pi;

void require_same_grid(const MatsubaraGreen& a, const MatsubaraGreen& b, const char* what) {
  if (a.size() != b.size() || a.beta != b.beta) {
    fail(Errc::invalid_argument, std::string(what) + ": Matsubara grids do not match");
  }
}

std::string at_frequency(std::size_t n, double w) {
  std::ostringstream os;
  os << " at n=" << n << " (w=" << w << ")";
  return os.str();
}

}  // namespace

std::vector<double> matsubara_grid(double beta, std::size_t n_freq) {
  if (!(beta > 0.0)) fail(Errc::invalid_argument, "beta must be > 0");
  if (n_freq < 1) fail(Errc::invalid_argument, "need at least one Matsubara frequency");
  std::vector<double> w(n_freq);
  for (std::size_t n = 0; n < n_freq; ++n) w[n] = (2.0 * static_cast<double>(n) + 1.0) * kPi / beta;
  return w;
}

double MatsubaraGreen::frequency(std::size_t n) const { return (2.0 * static_cast<double>(n) + 1.0) * kPi / beta; }

MatsubaraGreen MatsubaraGreen::zeros(double beta, std::size_t n_freq) {
  matsubara_grid(beta, n_freq);  // validates
  return {beta, std::vector<cplx>(n_freq, cplx{})};
}

MatsubaraGreen lattice_green(const MatsubaraGreen& sigma, const HubbardParams& p) {
  if (!(p.t > 0.0)) fail(Errc::invalid_argument, "hopping t must be > 0");
  const double d = p.half_bandwidth();
  MatsubaraGreen g{sigma.beta, std::vector<cplx>(sigma.size())};
  for (std::size_t n = 0; n < sigma.size(); ++n) {
    const cplx z = cplx{p.mu_shifted(), sigma.frequency(n)} - sigma.values[n];
    // (z - z sqrt(1 - D^2/z^2)) * 2/D^2 rewritten without the cancellation.
    const cplx root = std::sqrt(1.0 - d * d / (z * z));
    const cplx value = 2.0 / (z * (1.0 + root));
    if (!(value.imag() < 0.0) || !std::isfinite(value.real())) {
      fail(Errc::causality, "lattice Green's function lost causality" + at_frequency(n, sigma.frequency(n)));
    }
    g.values[n] = value;
  }
  return g;
}

MatsubaraGreen bath_update(const MatsubaraGreen& g_lat, const HubbardParams& p) {
  MatsubaraGreen delta = g_lat;
  for (auto& v : delta.values) v *= p.t * p.t;
  return delta;
}

MatsubaraGreen weiss_field(const MatsubaraGreen& g_imp, const MatsubaraGreen& sigma) {
  require_same_grid(g_imp, sigma, "weiss_field");
  MatsubaraGreen g0{g_imp.beta, std::vector<cplx>(g_imp.size())};
  for (std::size_t n = 0; n < g_imp.size(); ++n) {
    if (g_imp.values[n] == cplx{}) {
      fail(Errc::singularity, "impurity Green's function vanishes" + at_frequency(n, g_imp.frequency(n)));
    }
    g0.values[n] = 1.0 / (1.0 / g_imp.values[n] + sigma.values[n]);
  }
  return g0;
}

MatsubaraGreen dyson(const MatsubaraGreen& g0, const MatsubaraGreen& sigma) {
  require_same_grid(g0, sigma, "dyson");
  MatsubaraGreen g{g0.beta, std::vector<cplx>(g0.size())};
  for (std::size_t n = 0; n < g0.size(); ++n) {
    if (g0.values[n] == cplx{}) fail(Errc::singularity, "Weiss field vanishes" + at_frequency(n, g0.frequency(n)));
    g.values[n] = 1.0 / (1.0 / g0.values[n] - sigma.values[n]);
  }
  return g;
}

ImaginaryTimeTransform::ImaginaryTimeTransform(double beta, std::size_t n_freq, std::size_t n_tau)
    : beta_(beta), n_freq_(n_freq), n_tau_(n_tau) {
  if (!(beta > 0.0)) fail(Errc::invalid_argument, "beta must be > 0");
  if (n_freq < 8) fail(Errc::grid_too_small, "need at least 8 Matsubara frequencies for the tail treatment");
  // Below two tau points per frequency the linear interpolant cannot follow
  // e^{i w tau} at the top of the grid and the high-frequency tail diverges.
  if (n_tau < 2 * n_freq) fail(Errc::grid_too_small, "imaginary-time grid needs n_tau >= 2 * n_freq");
  phases_.resize(n_freq * (n_tau + 1));
  for (std::size_t n = 0; n < n_freq; ++n) {
    const double w = (2.0 * static_cast<double>(n) + 1.0) * kPi / beta;
    for (std::size_t j = 0; j <= n_tau; ++j) phases_[n * (n_tau + 1) + j] = std::polar(1.0, w * tau(j));
  }
}

std::vector<double> ImaginaryTimeTransform::to_tau(const MatsubaraGreen& g, double tail) const {
  if (g.size() != n_freq_ || g.beta != beta_) fail(Errc::invalid_argument, "to_tau: grid mismatch");
  std::vector<cplx> reduced(n_freq_);
  for (std::size_t n = 0; n < n_freq_; ++n) reduced[n] = g.values[n] - tail / cplx{0.0, g.frequency(n)};
  std::vector<double> out(n_tau_ + 1);
  for (std::size_t j = 0; j <= n_tau_; ++j) {
    double acc = 0.0;
    for (std::size_t n = 0; n < n_freq_; ++n) acc += (std::conj(phase(n, j)) * reduced[n]).real();
    out[j] = 2.0 / beta_ * acc - 0.5 * tail;
  }
  return out;
}

MatsubaraGreen ImaginaryTimeTransform::to_matsubara(const std::vector<double>& f) const {
  if (f.size() != n_tau_ + 1) fail(Errc::invalid_argument, "to_matsubara: tau grid mismatch");
  const double h = beta_ / static_cast<double>(n_tau_);
  MatsubaraGreen out{beta_, std::vector<cplx>(n_freq_)};
  for (std::size_t n = 0; n < n_freq_; ++n) {
    const cplx iw{0.0, out.frequency(n)};
    const cplx inv_iw = 1.0 / iw;
    const cplx inv_h_iw2 = 1.0 / (h * iw * iw);
    cplx acc{};
    for (std::size_t j = 0; j < n_tau_; ++j) {
      const cplx e0 = phase(n, j), e1 = phase(n, j + 1);
      const cplx a = (e1 - e0) * inv_iw;
      const cplx b = e1 * inv_iw - (e1 - e0) * inv_h_iw2;
      acc += f[j] * a + (f[j + 1] - f[j]) * b;
    }
    out.values[n] = acc;
  }
  return out;
}

MatsubaraGreen solve_impurity(const MatsubaraGreen& g0, const HubbardParams& p, const ImaginaryTimeTransform& ft) {
  if (p.u == 0.0) return MatsubaraGreen::zeros(g0.beta, g0.size());
  const std::vector<double> g_tau = ft.to_tau(g0);
  const std::size_t last = g_tau.size() - 1;
  std::vector<double> s_tau(g_tau.size());
  const double u2 = p.u * p.u;
  for (std::size_t j = 0; j <= last; ++j) s_tau[j] = u2 * g_tau[j] * g_tau[j] * g_tau[last - j];
  MatsubaraGreen sigma = ft.to_matsubara(s_tau);
  for (std::size_t n = 0; n < sigma.size(); ++n) {
    if (!std::isfinite(sigma.values[n].real()) || !std::isfinite(sigma.values[n].imag())) {
      fail(Errc::grid_too_small, "self-energy transform diverged" + at_frequency(n, sigma.frequency(n)));
    }
  }
  return sigma;
}

MatsubaraGreen solve_impurity(const MatsubaraGreen& g0, const HubbardParams& p) {
  const ImaginaryTimeTransform ft(g0.beta, g0.size(), 8 * g0.size());
  return solve_impurity(g0, p, ft);
}

double max_abs_diff(const MatsubaraGreen& a, const MatsubaraGreen& b) {
  require_same_grid(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
  return m;
}

DmftState self_consistency_loop(const HubbardParams& p, const LoopOptions& opts, const IterateObserver& observe) {
  if (!(opts.alpha > 0.0)) fail(Errc::invalid_argument, "alpha must be > 0");
  if (opts.max_iter < 1) fail(Errc::invalid_argument, "max_iter must be >= 1");
  if (!(opts.mixing > 0.0 && opts.mixing <= 1.0)) fail(Errc::invalid_argument, "mixing must lie in (0, 1]");
  if (!(p.u >= 0.0)) fail(Errc::invalid_argument, "U must be >= 0");
  if (!(p.beta > 0.0)) fail(Errc::invalid_argument, "beta must be > 0");
  if (std::abs(p.mu_shifted()) > 1e-12) {
    fail(Errc::invalid_argument, "the second-order solver needs half filling (mu = U/2)");
  }

  const ImaginaryTimeTransform ft(p.beta, opts.n_freq, opts.n_tau == 0 ? 8 * opts.n_freq : opts.n_tau);
  DmftState s;
  s.sigma = MatsubaraGreen::zeros(p.beta, opts.n_freq);

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    s.g_lat = lattice_green(s.sigma, p);
    s.delta = bath_update(s.g_lat, p);
    s.g0 = weiss_field(s.g_lat, s.sigma);
    const MatsubaraGreen sigma_new = solve_impurity(s.g0, p, ft);
    s.g_imp = dyson(s.g0, sigma_new);

    MatsubaraGreen mixed = sigma_new;
    for (std::size_t n = 0; n < mixed.size(); ++n) {
      mixed.values[n] = opts.mixing * sigma_new.values[n] + (1.0 - opts.mixing) * s.sigma.values[n];
    }
    s.residual = max_abs_diff(mixed, s.sigma);
    s.residual_history.push_back(s.residual);
    s.sigma = std::move(mixed);
    s.iteration = it;
    s.converged = s.residual <= opts.alpha;
    if (observe) observe(s);
    if (s.converged) break;
  }
  return s;
}

}  // namespace adiabench::dmft
