#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "core/adiabatic_optimizer.hpp"
#include "core/error.hpp"

using namespace adiabench;
using namespace adiabench::opt;

namespace {

// -sum_{i<j} J_ij s_i s_j straight from the coupling list, bit set = spin down
double brute_energy(const IsingSpec& spec, ConfigId id) {
  double e = 0;
  for (const auto& c : spec.couplings) {
    if (c.i >= c.j) continue;
    const int si = ((id >> c.i) & 1) ? -1 : 1;
    const int sj = ((id >> c.j) & 1) ? -1 : 1;
    e -= c.value * si * sj;
  }
  return e;
}

double brute_min(const IsingSpec& spec) {
  double m = std::numeric_limits<double>::infinity();
  for (ConfigId id = 0; id < (ConfigId{1} << spec.site_count); ++id) m = std::min(m, brute_energy(spec, id));
  return m;
}

IsingSpec two_spin(double j) { return {2, {{0, 1, j}, {1, 0, j}}, 0.0}; }

AdiabaticSchedule zero_drive_schedule() {
  AdiabaticSchedule s;
  s.gap = 1.0;
  s.total_time = 1.0;
  s.drive_energy = 0.0;
  s.steps = 200;
  return s;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("table model wraps the energies") {
    const auto m = reduce(std::vector<double>{5, 1, 4, 0, 6});
    CHECK(m.config_count() == 5);
    CHECK(m.energy(3) == 0);
    std::vector<Neighbor> nb;
    m.neighbors(0, nb);
    REQUIRE(nb.size() == 1);
    CHECK(nb[0].id == 1);
    m.neighbors(2, nb);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0].id == 1);
    CHECK(nb[1].id == 3);
  }

  TEST_CASE("two-spin energies by hand") {
    const auto m = reduce(two_spin(1.0));
    CHECK(m.energy(0b00) == -1);
    CHECK(m.energy(0b01) == 1);
    CHECK(m.energy(0b10) == 1);
    CHECK(m.energy(0b11) == -1);
  }

  TEST_CASE("random 10-spin energies match exhaustive sum") {
    for (std::uint64_t seed : {1u, 7u, 42u}) {
      const auto spec = random_ising(10, seed);
      const auto m = reduce(spec);
      for (ConfigId id = 0; id < 1024; ++id) REQUIRE(m.energy(id) == doctest::Approx(brute_energy(spec, id)));
    }
  }

  TEST_CASE("asymmetric or self couplings are rejected") {
    IsingSpec one_way{2, {{0, 1, 1.0}}, 0};
    CHECK_THROWS_AS(reduce(one_way), Error);
    IsingSpec self{2, {{1, 1, 1.0}}, 0};
    CHECK_THROWS_AS(reduce(self), Error);
    IsingSpec range{2, {{0, 5, 1.0}, {5, 0, 1.0}}, 0};
    CHECK_THROWS_AS(reduce(range), Error);
  }

  TEST_CASE("schedule unit cases") {
    CHECK(map_schedule(1.0, 1.0, 1.0).total_time == 1.0);
    CHECK(map_schedule(0.5, 1.0, 1.0).total_time == 4.0);
    CHECK_THROWS_AS(map_schedule(0.0, 1.0, 1.0), Error);
  }

  TEST_CASE("schedule law holds for random triples") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> le(-6, 3), ls(0, 1);
    for (int i = 0; i < 10000; ++i) {
      const double e = std::pow(10.0, le(rng));
      const double g = std::pow(10.0, le(rng) / 2);
      const double safety = 1.0 + 9.0 * ls(rng);
      try {
        const auto s = map_schedule(g, e, safety, 1.0);
        REQUIRE(s.total_time * (g * g) >= e);
      } catch (const Error& err) {
        // only the step-count cap may refuse a valid triple
        REQUIRE(err.code() == Errc::schedule);
      }
    }
  }

  TEST_CASE("ramp is monotone over the schedule") {
    const auto s = map_schedule(0.5, 2.0, 1.0);
    const auto r = s.ramp(15);
    REQUIRE(r.size() == 15);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].drive >= r[i - 1].drive);
    CHECK(r.back().drive == 2.0);
  }

  TEST_CASE("gap selection") {
    const GapCandidate one[] = {{0.3, 1, 1}};
    CHECK(select_gap(one, 0, 0).chosen == 0);

    const GapCandidate two[] = {{0.2, 1, 0.1}, {0.5, 10, 0.9}};
    CHECK(select_gap(two, 5, 0.5).chosen == 1);
    CHECK(select_gap(two, 0, 0).chosen == 0);
    CHECK_THROWS_AS(select_gap(two, 100, 0), Error);

    const GapCandidate tie[] = {{0.2, 1, 0.1}, {0.2, 1, 0.4}, {0.2, 1, 0.4}};
    CHECK(select_gap(tie, 0, 0).chosen == 1);
  }

  TEST_CASE("table candidates are the local minima") {
    const auto m = reduce(std::vector<double>{5, 1, 4, 0, 6});
    const auto c = enumerate_candidates(m);
    REQUIRE(c.size() == 2);
    CHECK(c[0] == Candidate{3, 0});
    CHECK(c[1] == Candidate{1, 1});

    const auto mono = enumerate_candidates(reduce(std::vector<double>{5, 4, 3, 2, 1}));
    REQUIRE(mono.size() == 1);
    CHECK(mono[0].id == 4);
  }

  TEST_CASE("local-minimum scan agrees with brute force") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto t = random_table(500, seed);
      std::vector<ConfigId> expect;
      for (std::size_t i = 0; i < t.size(); ++i) {
        bool ok = true;
        if (i > 0 && t[i - 1] < t[i]) ok = false;
        if (i + 1 < t.size() && t[i + 1] < t[i]) ok = false;
        if (ok) expect.push_back(i);
      }
      auto got = enumerate_candidates(reduce(t));
      std::vector<ConfigId> ids;
      for (const auto& c : got) ids.push_back(c.id);
      std::sort(ids.begin(), ids.end());
      CHECK(ids == expect);
      CHECK(std::is_sorted(got.begin(), got.end(), [](auto& a, auto& b) { return a.energy < b.energy; }));
    }
  }

  TEST_CASE("degenerate two-spin ground states kept in id order") {
    const auto c = enumerate_candidates(reduce(two_spin(1.0)), {32, 5});
    REQUIRE(c.size() == 2);
    CHECK(c[0].id == 0b00);
    CHECK(c[1].id == 0b11);
    CHECK(c[0].energy == -1);
  }

  TEST_CASE("ground selection cost stays within the bound") {
    for (std::size_t k = 1; k < 300; ++k) {
      std::vector<Candidate> c;
      for (std::size_t i = 0; i < k; ++i) c.push_back({i, static_cast<double>(i < k / 3 ? 0 : i)});
      const auto g = select_ground_states(c);
      CHECK(g.ground_count == std::max<std::size_t>(1, k / 3));
      CHECK(g.comparisons <= selection_bound(k));
      CHECK(selection_bound(k) == static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(k)))) + 1);
    }
  }

  TEST_CASE("evolve escapes the greedy trap") {
    const auto m = reduce(std::vector<double>{5, 1, 4, 0, 6});
    EvolveOptions o;
    o.start = 0;
    o.merge_candidates = false;
    CHECK(greedy(m, 1, o).best_energy == 1);

    const auto s = map_schedule(1.0, 1.0, 1.0);
    const BarrierMapping barrier;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      if (evolve(m, s, barrier, seed, o).best_energy == 0) ++hits;
    }
    CHECK(hits >= 990);
  }

  TEST_CASE("zero drive reproduces the greedy incumbent") {
    const auto m = reduce(std::vector<double>{5, 1, 4, 0, 6});
    EvolveOptions o;
    o.start = 0;
    o.merge_candidates = false;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto g = greedy(m, seed, o);
      const auto e = evolve(m, zero_drive_schedule(), BarrierMapping{}, seed, o);
      CHECK(e.best_id == g.best_id);
      CHECK(e.best_energy == g.best_energy);
      CHECK(e.escape_count == 0);
    }
  }

  TEST_CASE("long schedule finds the 10-spin ground state") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto spec = random_ising(10, seed);
      const auto m = reduce(spec);
      const auto s = map_schedule(1.0, 1.0, 10.0);
      const auto r = evolve(m, s, BarrierMapping{}, seed);
      if (r.best_energy == doctest::Approx(brute_min(spec)).epsilon(1e-12)) ++hits;
    }
    CHECK(hits >= 95);
  }

  TEST_CASE("inadmissible schedule is refused") {
    AdiabaticSchedule s;
    s.gap = 1;
    s.total_time = 0.5;
    s.drive_energy = 1;
    s.steps = 10;
    CHECK_THROWS_AS(evolve(reduce(std::vector<double>{1, 0}), s, BarrierMapping{}, 0), Error);
  }

  TEST_CASE("scaling is deterministic and bounded") {
    const std::uint64_t one[] = {1};
    const auto tiny = scaling_experiment(one, 3, 9);
    CHECK(tiny.rows[0].mean_comparisons <= 1.0);

    const std::uint64_t sizes[] = {300, 1000, 3000};
    const auto a = scaling_experiment(sizes, 3, 42);
    const auto b = scaling_experiment(sizes, 3, 42);
    CHECK(a.bound_violations == 0);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].mean_comparisons == b.rows[i].mean_comparisons);
      CHECK(a.rows[i].mean_candidates == b.rows[i].mean_candidates);
    }
  }

  TEST_CASE("log fit r2") {
    std::vector<double> x{1, 10, 100, 1000}, y;
    for (double v : x) y.push_back(2 + 3 * std::log(v));
    CHECK(log_fit_r2(x, y) == doctest::Approx(1.0));
  }

  TEST_CASE("pipeline records all phase timings") {
    PipelineOptions o;
    const auto r = run_pipeline(std::vector<double>{5, 1, 4, 0, 6}, o, 42);
    CHECK(r.best_id == 3);
    for (const char* k : {"reduction", "optimization", "mapping", "evolution", "simulation"}) {
      CHECK(r.phase_timings.count(k) == 1);
    }
  }
}

TEST_SUITE("optimizer") {
  TEST_CASE("identical inputs give identical reports") {
    const auto m = reduce(random_ising(12, 3));
    const auto s = map_schedule(0.7, 1.3, 2.0);
    const auto a = evolve(m, s, BarrierMapping{}, 99);
    const auto b = evolve(m, s, BarrierMapping{}, 99);
    CHECK(a.best_id == b.best_id);
    CHECK(a.best_energy == b.best_energy);
    CHECK(a.visited_count == b.visited_count);
    CHECK(a.escape_count == b.escape_count);
    CHECK(a.comparison_count == b.comparison_count);
  }

  TEST_CASE("evolve never does worse than greedy") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const bool ising = seed % 2;
      const auto m = ising ? reduce(random_ising(8 + seed % 5, seed)) : reduce(random_table(50 + 37 * seed, seed));
      EvolveOptions o;
      if (seed % 3 == 0) {
        o.start = 0;
        o.merge_candidates = false;
      }
      const auto g = greedy(m, seed, o);
      const auto e = evolve(m, map_schedule(1.0, 0.5, 1.0), BarrierMapping{}, seed, o);
      CHECK(e.best_energy <= g.best_energy);
    }
  }
}
