#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "adiabench/adiabench.h"

namespace fs = std::filesystem;

TEST_SUITE("capi") {
  TEST_CASE("config lifecycle") {
    adb_config* c = nullptr;
    REQUIRE(adb_config_default(&c) == ADB_OK);
    CHECK(adb_config_seed(c) == 42);
    CHECK(std::string(adb_config_output_dir(c)) == "out");
    CHECK(adb_config_set_seed(c, 9) == ADB_OK);
    CHECK(adb_config_set(c, "tunnel.e_ev", "1.5") == ADB_OK);
    CHECK(adb_config_set(c, "tunnel.e_ev", "oops") == ADB_CONFIG);
    CHECK(std::string(adb_last_error()).find("tunnel.e_ev") != std::string::npos);
    CHECK(adb_config_set(c, "output_dir", "elsewhere") == ADB_OK);
    CHECK(std::string(adb_config_output_dir(c)) == "elsewhere");

    char* text = nullptr;
    REQUIRE(adb_config_serialize(c, &text) == ADB_OK);
    adb_config* d = nullptr;
    REQUIRE(adb_config_parse(text, &d) == ADB_OK);
    CHECK(adb_config_seed(d) == 9);
    adb_string_free(text);
    adb_config_free(d);
    adb_config_free(c);
  }

  TEST_CASE("parse errors surface as status codes") {
    adb_config* c = nullptr;
    CHECK(adb_config_parse("laser.e_in = -1\n", &c) == ADB_CONFIG);
    CHECK(c == nullptr);
    CHECK(std::string(adb_last_error()).find("line 1") != std::string::npos);
    CHECK(adb_config_load("/nonexistent.cfg", &c) == ADB_IO);
    CHECK(adb_config_default(nullptr) == ADB_INVALID_ARGUMENT);
  }

  TEST_CASE("status names") {
    CHECK(std::string(adb_status_name(ADB_OK)) == "ok");
    CHECK(std::string(adb_status_name(ADB_INTERNAL)) != "unknown");
    CHECK(std::string(adb_status_name(static_cast<adb_status>(999))) == "unknown");
  }

  TEST_CASE("tunnelling through the C surface") {
    adb_tunnel_result r{};
    REQUIRE(adb_tunnel_transmission(10.2, 1.5, 0.5e-9, 9.1e-31, &r) == ADB_OK);
    CHECK(r.transmission == doctest::Approx(2.76e-7).epsilon(0.05));
    CHECK(adb_tunnel_transmission(10.2, 11, 0.5e-9, 9.1e-31, &r) == ADB_ABOVE_BARRIER);
    double ev = 0;
    REQUIRE(adb_barrier_height_bohr(1, 1, 2, &ev) == ADB_OK);
    CHECK(ev == doctest::Approx(10.2));
    CHECK(adb_barrier_height_bohr(1, 2, 1, &ev) == ADB_ORDERING);
    CHECK(adb_average_electron_energy(1, 0, 1, &ev) == ADB_DIVISION);
  }

  TEST_CASE("models and optimizer") {
    const double t[] = {5, 1, 4, 0, 6};
    adb_model* m = nullptr;
    REQUIRE(adb_model_from_table(t, 5, &m) == ADB_OK);
    CHECK(adb_model_size(m) == 5);
    double e = -1;
    CHECK(adb_model_energy(m, 3, &e) == ADB_OK);
    CHECK(e == 0);

    adb_config* c = nullptr;
    adb_config_default(&c);
    adb_optimizer_report r{};
    REQUIRE(adb_optimize_evolve(m, c, 1, &r) == ADB_OK);
    CHECK(r.best_id == 3);
    REQUIRE(adb_optimize_greedy(m, 1, &r) == ADB_OK);
    CHECK(r.best_energy == 0);
    adb_model_free(m);

    const double j[] = {0, 1, 1, 0};
    REQUIRE(adb_model_from_ising(2, j, 0, &m) == ADB_OK);
    CHECK(adb_model_size(m) == 4);
    adb_model_energy(m, 1, &e);
    CHECK(e == 1);
    adb_model_free(m);
    const double bad[] = {0, 1, 2, 0};
    CHECK(adb_model_from_ising(2, bad, 0, &m) == ADB_VALIDATION);

    REQUIRE(adb_optimize_run(c, nullptr, &r) == ADB_OK);
    CHECK(r.best_id == 3);
    CHECK(r.seed == 42);
    adb_config_free(c);
  }

  TEST_CASE("dmft handle and non-convergence") {
    adb_config* c = nullptr;
    adb_config_default(&c);
    adb_config_set(c, "dmft.n_freq", "64");
    adb_config_set(c, "dmft.max_iter", "2");
    adb_config_set(c, "dmft.alpha", "1e-300");
    adb_dmft_result* r = nullptr;
    CHECK(adb_dmft_run(c, nullptr, nullptr, &r) == ADB_NOT_CONVERGED);
    REQUIRE(r != nullptr);
    CHECK(adb_dmft_iterations(r) == 2);
    CHECK(adb_dmft_converged(r) == 0);
    CHECK(adb_dmft_size(r) == 64);
    double re = 0, im = 0;
    CHECK(adb_dmft_g_imp(r, 0, &re, &im) == ADB_OK);
    CHECK(im < 0);
    CHECK(adb_dmft_sigma(r, 64, &re, &im) == ADB_INVALID_ARGUMENT);
    adb_dmft_free(r);
    adb_config_free(c);
  }
}

#ifdef ADIABENCH_CLI
namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(ADIABENCH_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    const fs::path dir = fs::temp_directory_path() / "adiabench_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string out = " --out " + dir.string();

    CHECK(run("--help") == 0);
    CHECK(run("") == 64);
    CHECK(run("--no-such-flag tunnel") == 64);
    CHECK(run("--seed notanumber tunnel") == 64);
    CHECK(run("laser") == 64);
    CHECK(run(out + " tunnel") == 0);
    CHECK(fs::exists(dir / "tunnel.csv"));
    CHECK(run(out + " tunnel --e-ev 11") == 65);
    CHECK(run(out + " --set bogus=1 tunnel") == 65);
    CHECK(run(out + " --set laser.e_in=-1 tunnel") == 65);
    CHECK(run("--config /nonexistent.cfg tunnel") == 74);

    std::ofstream(dir / "plain") << "x";
    CHECK(run("--out " + (dir / "plain" / "sub").string() + " tunnel") == 74);
    CHECK(run("--out " + (dir / "plain" / "sub").string() + " reproduce") == 74);

    std::ofstream(dir / "bad.cfg") << "laser.e_in = 1\nmystery = 3\n";
    CHECK(run("--config " + (dir / "bad.cfg").string() + " tunnel") == 65);

    CHECK(run(out + " --set dmft.n_freq=64 --set dmft.max_iter=2 --set dmft.alpha=1e-300 dmft run") == 2);
    CHECK(run(out + " --set dmft.n_freq=64 dmft run") == 0);
    CHECK(fs::exists(dir / "dmft_iterations.csv"));
    CHECK(fs::exists(dir / "dmft_green.csv"));
    CHECK(run(out + " optimize run") == 0);
    CHECK(run(out + " config") == 0);
  }
}
#endif
