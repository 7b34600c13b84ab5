#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common/oracles.hpp"
#include "core/dmft.hpp"
#include "core/error.hpp"

using namespace adiabench;
using namespace adiabench::dmft;

namespace {

HubbardParams bethe(double u, double beta) {
  HubbardParams p;
  p.t = 1.0;
  p.u = u;
  p.mu = u / 2;
  p.beta = beta;
  return p;
}

MatsubaraGreen free_tail(double beta, std::size_t n) {
  MatsubaraGreen g = MatsubaraGreen::zeros(beta, n);
  for (std::size_t k = 0; k < n; ++k) g.values[k] = 1.0 / cplx{0, g.frequency(k)};
  return g;
}

}  // namespace

TEST_SUITE("dmft") {
  TEST_CASE("matsubara grid") {
    const auto a = matsubara_grid(std::numbers::pi, 2);
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[1] == doctest::Approx(3.0));
    CHECK(matsubara_grid(2 * std::numbers::pi, 1)[0] == doctest::Approx(0.5));
    for (double beta : {0.3, 8.0, 100.0}) {
      const auto w = matsubara_grid(beta, 2);
      CHECK(w[1] / w[0] == doctest::Approx(3.0).epsilon(1e-15));
    }
  }

  TEST_CASE("lattice green matches the quadrature oracle") {
    const auto p = bethe(0, 16);
    const auto sigma = MatsubaraGreen::zeros(16, 64);
    const auto g = lattice_green(sigma, p);
    for (std::size_t n : {0u, 1u, 5u, 63u}) {
      const cplx ref = oracle::semicircle_green({0, g.frequency(n)}, 2.0);
      CHECK(std::abs(g.values[n] - ref) < 1e-12);
    }
    // beta = pi puts w0 at 1; there G = (z - sqrt(z^2 - D^2)) * 2 / D^2 = i (1 - sqrt 5) / 2
    const MatsubaraGreen one{std::numbers::pi, {cplx{}}};
    const auto g1 = lattice_green(one, p);
    CHECK(std::abs(g1.values[0] - oracle::semicircle_green({0, 1}, 2.0)) < 1e-12);
    CHECK(g1.values[0].imag() == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-14));
    CHECK(std::abs(g1.values[0].real()) < 1e-15);
  }

  TEST_CASE("lattice green tail and shift invariance") {
    const auto p = bethe(0, 16);
    const auto g = lattice_green(MatsubaraGreen::zeros(16, 4000), p);
    const double w = g.frequency(3999);
    CHECK(std::abs(g.values[3999] * cplx{0, w} - 1.0) < 1e-4);

    auto shifted = MatsubaraGreen::zeros(16, 32);
    for (auto& v : shifted.values) v = 0.3;
    HubbardParams ps = p;
    ps.mu = 0.3;
    const auto a = lattice_green(shifted, ps);
    const auto b = lattice_green(MatsubaraGreen::zeros(16, 32), p);
    CHECK(max_abs_diff(a, b) < 1e-14);
  }

  TEST_CASE("acausal self-energy is reported") {
    auto sigma = MatsubaraGreen::zeros(16, 8);
    sigma.values[2] = cplx{0, 50.0};
    try {
      lattice_green(sigma, bethe(0, 16));
      FAIL("expected causality error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::causality);
      CHECK(std::string(e.what()).find("n=2") != std::string::npos);
    }
  }

  TEST_CASE("bath update scaling") {
    auto g = MatsubaraGreen::zeros(16, 4);
    CHECK(max_abs_diff(bath_update(g, bethe(0, 16)), g) == 0);
    g.values[0] = cplx{0, -0.5};
    CHECK(bath_update(g, bethe(0, 16)).values[0] == cplx{0, -0.5});
    HubbardParams half = bethe(0, 16);
    half.t = 0.5;
    CHECK(bath_update(g, half).values[0] == cplx{0, -0.125});
  }

  TEST_CASE("dyson identities") {
    const auto g = lattice_green(MatsubaraGreen::zeros(8, 16), bethe(0, 8));
    const auto zero = MatsubaraGreen::zeros(8, 16);
    CHECK(max_abs_diff(weiss_field(g, zero), g) == 0);

    auto sigma = MatsubaraGreen::zeros(8, 16);
    for (std::size_t n = 0; n < 16; ++n) sigma.values[n] = cplx{0.1, -0.2 / (n + 1)};
    MatsubaraGreen gi = g;
    for (std::size_t n = 0; n < 16; ++n) gi.values[n] = 1.0 / (cplx{0, g.frequency(n)} - sigma.values[n]);
    const auto g0 = weiss_field(gi, sigma);
    for (std::size_t n = 0; n < 16; ++n) CHECK(std::abs(g0.values[n] - 1.0 / cplx{0, g.frequency(n)}) < 1e-14);

    CHECK(max_abs_diff(dyson(weiss_field(g, sigma), sigma), g) < 1e-12);

    auto dead = g;
    dead.values[4] = 0;
    CHECK_THROWS_AS(weiss_field(dead, sigma), Error);
  }

  TEST_CASE("free propagator round-trips through imaginary time") {
    const ImaginaryTimeTransform ft(8, 64, 512);
    const auto g = free_tail(8, 64);
    for (double v : ft.to_tau(g)) CHECK(v == doctest::Approx(-0.5).epsilon(1e-12));
    const auto back = ft.to_matsubara(ft.to_tau(g));
    CHECK(max_abs_diff(back, g) < 1e-12);
  }

  TEST_CASE("semicircle G(tau) agrees with the real-energy integral") {
    const double beta = 16;
    const ImaginaryTimeTransform ft(beta, 1024, 8192);
    const auto g = lattice_green(MatsubaraGreen::zeros(beta, 1024), bethe(0, beta));
    const auto tau = ft.to_tau(g);
    for (std::size_t j : {1u, 100u, 2048u, 4096u, 8000u}) {
      CHECK(tau[j] == doctest::Approx(oracle::semicircle_g_tau(ft.tau(j), beta, 2.0)).epsilon(1e-4));
    }
  }

  TEST_CASE("impurity solver limits") {
    const auto g0 = free_tail(8, 32);
    const auto s0 = solve_impurity(g0, bethe(0, 8));
    CHECK(max_abs_diff(s0, MatsubaraGreen::zeros(8, 32)) == 0);

    // constant G0(tau) = -1/2 gives Sigma = U^2 / (4 i w) exactly
    const auto s1 = solve_impurity(g0, bethe(1, 8));
    CHECK(std::abs(s1.values[0] - 0.25 / cplx{0, s1.frequency(0)}) < 1e-12);

    const auto s2 = solve_impurity(g0, bethe(2, 8));
    for (std::size_t n = 0; n < 32; ++n) CHECK(std::abs(s2.values[n] - 4.0 * s1.values[n]) < 1e-12);
  }

  TEST_CASE("second-order self-energy against dense tau quadrature") {
    const double beta = 16;
    const auto p = bethe(1, beta);
    const auto g0 = lattice_green(MatsubaraGreen::zeros(beta, 512), bethe(0, beta));
    const auto sigma = solve_impurity(g0, p);
    for (int n : {0, 1, 4}) {
      const cplx ref = oracle::ipt_sigma(1.0, beta, 2.0, n);
      CHECK(std::abs(sigma.values[n] - ref) < 1e-4 * std::abs(ref) + 1e-7);
    }
  }

  TEST_CASE("grid checks") {
    CHECK_THROWS_AS(ImaginaryTimeTransform(8, 4, 64), Error);
    try {
      ImaginaryTimeTransform(8, 64, 100);
      FAIL("expected grid_too_small");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::grid_too_small);
    }
  }

  TEST_CASE("U = 0 loop converges at once onto the semicircle") {
    LoopOptions o;
    o.n_freq = 256;
    const auto s = self_consistency_loop(bethe(0, 16), o);
    CHECK(s.converged);
    CHECK(s.iteration <= 2);
    for (std::size_t n = 0; n < s.g_imp.size(); n += 17) {
      CHECK(std::abs(s.g_imp.values[n] - oracle::semicircle_green({0, s.g_imp.frequency(n)}, 2.0)) < 1e-8);
    }
  }

  TEST_CASE("U = 1 residual decreases after the first iterations") {
    LoopOptions o;
    o.n_freq = 512;
    const auto s = self_consistency_loop(bethe(1, 16), o);
    CHECK(s.converged);
    const auto& h = s.residual_history;
    for (std::size_t i = 3; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
  }

  TEST_CASE("loose alpha stops after one iteration") {
    LoopOptions o;
    o.n_freq = 64;
    o.alpha = 10.0;
    const auto s = self_consistency_loop(bethe(2, 16), o);
    CHECK(s.iteration == 1);
    CHECK(s.converged);
  }

  TEST_CASE("iteration cap reports non-convergence") {
    LoopOptions o;
    o.n_freq = 64;
    o.alpha = 1e-300;
    o.max_iter = 3;
    const auto s = self_consistency_loop(bethe(2, 16), o);
    CHECK_FALSE(s.converged);
    CHECK(s.residual_history.size() == 3);
  }

  TEST_CASE("away from half filling is refused") {
    HubbardParams p = bethe(1, 16);
    p.mu = 0.2;
    CHECK_THROWS_AS(self_consistency_loop(p, LoopOptions{}), Error);
  }
}

TEST_SUITE("dmft") {
  TEST_CASE("iterates keep causality and particle-hole symmetry") {
    for (double u : {1.0, 2.0, 3.0}) {
      LoopOptions o;
      o.n_freq = 256;
      bool causal = true;
      double worst_re = 0;
      const auto s = self_consistency_loop(bethe(u, 16), o, [&](const DmftState& st) {
        for (std::size_t n = 0; n < st.g_imp.size(); ++n) {
          if (!(st.g_imp.values[n].imag() < 0) || st.sigma.values[n].imag() > 0) causal = false;
          worst_re = std::max(worst_re, std::abs(st.g_imp.values[n].real()));
        }
      });
      CHECK(causal);
      CHECK(worst_re < 1e-10);
      REQUIRE(s.converged);
      CHECK(max_abs_diff(s.g_lat, s.g_imp) <= 10 * o.alpha);
    }
  }
}
