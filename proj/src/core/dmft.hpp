#pragma once

// Desk-scale DMFT for the half-filled Hubbard model on the Bethe lattice:
// semicircular lattice Green's function, Delta = t^2 G closure, Dyson
// inversion for the Weiss field and a second-order (IPT) impurity solver.

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace adiabench::dmft {

using cplx = std::complex<double>;

struct HubbardParams {
  double t = 1.0;     // hopping; half bandwidth D = 2t
  double u = 0.0;     // on-site repulsion
  double mu = 0.0;    // chemical potential; half filling is mu = u/2
  double beta = 8.0;  // 16 / D

  double half_bandwidth() const { return 2.0 * t; }
  // Chemical potential measured from half filling; the self-energy carried
  // around the loop excludes the Hartree shift u/2.
  double mu_shifted() const { return mu - 0.5 * u; }
};

// Fermionic frequencies w_n = (2n+1) pi / beta, n = 0..n_freq-1.
std::vector<double> matsubara_grid(double beta, std::size_t n_freq);

struct MatsubaraGreen {
  double beta = 0;
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  double frequency(std::size_t n) const;

  static MatsubaraGreen zeros(double beta, std::size_t n_freq);
};

// G(z) = (z - s sqrt(z^2 - D^2)) / (D^2 / 2) at z = i w_n + mu - Sigma, with
// the branch that keeps Im G < 0. Throws Errc::causality otherwise.
MatsubaraGreen lattice_green(const MatsubaraGreen& sigma, const HubbardParams& p);

// Bethe closure Delta = t^2 G.
MatsubaraGreen bath_update(const MatsubaraGreen& g_lat, const HubbardParams& p);

// Dyson: G0^-1 = G^-1 + Sigma.
MatsubaraGreen weiss_field(const MatsubaraGreen& g_imp, const MatsubaraGreen& sigma);

// Inverse Dyson: G^-1 = G0^-1 - Sigma.
MatsubaraGreen dyson(const MatsubaraGreen& g0, const MatsubaraGreen& sigma);

// Matsubara <-> imaginary-time transforms on a uniform tau grid over [0, beta]
// with n_tau + 1 points. The forward direction subtracts the 1/(i w) tail
// analytically; the backward direction integrates the piecewise-linear
// interpolant of f(tau) exactly against e^{i w tau}.
class ImaginaryTimeTransform {
 public:
  ImaginaryTimeTransform(double beta, std::size_t n_freq, std::size_t n_tau);

  std::size_t n_freq() const { return n_freq_; }
  std::size_t n_points() const { return n_tau_ + 1; }
  double beta() const { return beta_; }
  double tau(std::size_t j) const { return beta_ * static_cast<double>(j) / static_cast<double>(n_tau_); }

  // g(tau_j) for a function with leading tail `tail / (i w)`; tau = 0 and
  // beta are the 0+ and beta- limits.
  std::vector<double> to_tau(const MatsubaraGreen& g, double tail = 1.0) const;
  MatsubaraGreen to_matsubara(const std::vector<double>& f) const;

 private:
  cplx phase(std::size_t n, std::size_t j) const { return phases_[n * (n_tau_ + 1) + j]; }

  double beta_;
  std::size_t n_freq_;
  std::size_t n_tau_;
  std::vector<cplx> phases_;  // e^{i w_n tau_j}
};

// Sigma(tau) = U^2 G0(tau)^2 G0(beta - tau), transformed back to Matsubara.
MatsubaraGreen solve_impurity(const MatsubaraGreen& g0, const HubbardParams& p, const ImaginaryTimeTransform& ft);
MatsubaraGreen solve_impurity(const MatsubaraGreen& g0, const HubbardParams& p);

struct DmftState {
  MatsubaraGreen sigma;
  MatsubaraGreen g_imp;
  MatsubaraGreen g_lat;
  MatsubaraGreen delta;
  MatsubaraGreen g0;  // Weiss field
  std::size_t iteration = 0;
  double residual = 0;
  std::vector<double> residual_history;
  bool converged = false;
};

struct LoopOptions {
  double alpha = 1e-6;
  std::size_t max_iter = 200;
  double mixing = 0.7;
  std::size_t n_freq = 512;
  std::size_t n_tau = 0;  // 0 -> 8 * n_freq
};

using IterateObserver = std::function<void(const DmftState&)>;

// Initializes Sigma = 0 and iterates lattice_green -> bath_update ->
// weiss_field -> solve_impurity with linear mixing until
// max |Sigma - Sigma_old| <= alpha. Non-convergence is reported through
// `converged == false` with the full residual history.
DmftState self_consistency_loop(const HubbardParams& p, const LoopOptions& opts, const IterateObserver& observe = {});

double max_abs_diff(const MatsubaraGreen& a, const MatsubaraGreen& b);

}  // namespace adiabench::dmft
