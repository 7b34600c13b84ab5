// adiabench command-line workbench. Everything below goes through the C API.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adiabench/adiabench.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 2;
constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;
constexpr int kExitSoftware = 70;
constexpr int kExitIo = 74;

int exit_code(adb_status s) {
  switch (s) {
    case ADB_OK: return kExitOk;
    case ADB_IO:
    case ADB_SCHEMA: return kExitIo;
    case ADB_NUMERIC_INSTABILITY:
    case ADB_NO_PULSE:
    case ADB_CAUSALITY:
    case ADB_SINGULARITY:
    case ADB_NOT_CONVERGED: return kExitFail;
    case ADB_INTERNAL: return kExitSoftware;
    default: return kExitConfig;  // bad values that came from the config or flags
  }
}

struct Failure {
  adb_status status;
};

void check(adb_status s) {
  if (s != ADB_OK) throw Failure{s};
}

struct ConfigDeleter {
  void operator()(adb_config* c) const { adb_config_free(c); }
};
using ConfigPtr = std::unique_ptr<adb_config, ConfigDeleter>;

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> sets;
};

ConfigPtr load(const Globals& g) {
  adb_config* raw = nullptr;
  check(g.config_path.empty() ? adb_config_default(&raw) : adb_config_load(g.config_path.c_str(), &raw));
  ConfigPtr cfg(raw);
  for (const auto& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      throw Failure{ADB_CONFIG};
    }
    check(adb_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (!g.out_dir.empty()) check(adb_config_set_output_dir(cfg.get(), g.out_dir.c_str()));
  if (g.seed_given) check(adb_config_set_seed(cfg.get(), g.seed));
  return cfg;
}

std::string out_file(const adb_config* cfg, const char* name) {
  const fs::path dir = adb_config_output_dir(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory '%s': %s\n", dir.c_str(), ec.message().c_str());
    throw Failure{ADB_IO};
  }
  return (dir / name).string();
}

void set_if(adb_config* cfg, const char* key, const std::string& value) {
  if (!value.empty()) check(adb_config_set(cfg, key, value.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adiabench: laser kinetics, tunnelling, adiabatic optimizer and DMFT workbench"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config_path, "Configuration file (section.key = value)");
  app.add_option("--out", g.out_dir, "Output directory (overrides output_dir)");
  app.add_option_function<std::uint64_t>(
      "--seed",
      [&](std::uint64_t s) {
        g.seed = s;
        g.seed_given = true;
      },
      "Run seed (overrides seed)");
  app.add_option("--set", g.sets, "Override one config key: key=value (repeatable)");

  auto* laser = app.add_subcommand("laser", "Dye-laser rate equations");
  laser->require_subcommand(1);
  auto* l_sim = laser->add_subcommand("simulate", "One pulse: laser_trace.csv and its metrics");
  auto* l_se = laser->add_subcommand("sweep-energy", "Pulse metrics over laser.energies");
  auto* l_sd = laser->add_subcommand("sweep-dt", "Pulse metrics over laser.dts");

  auto* tun = app.add_subcommand("tunnel", "Rectangular-barrier transmission");
  std::string u_ev, e_ev, width_m;
  tun->add_option("--u-ev", u_ev, "Barrier height, eV");
  tun->add_option("--e-ev", e_ev, "Particle energy, eV");
  tun->add_option("--width-m", width_m, "Barrier width, m");

  auto* optc = app.add_subcommand("optimize", "Adiabatic optimizer");
  optc->require_subcommand(1);
  auto* o_run = optc->add_subcommand("run", "Full pipeline on the configured landscape");
  auto* o_scale = optc->add_subcommand("scaling", "Selection comparisons against data-point count");

  auto* dm = app.add_subcommand("dmft", "Bethe-lattice DMFT with a second-order solver");
  dm->require_subcommand(1);
  auto* d_run = dm->add_subcommand("run", "Self-consistency loop");

  auto* repro = app.add_subcommand("reproduce", "Regenerate every reference table and manifest.csv");
  auto* show = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    ConfigPtr cfg = load(g);
    adb_config* c = cfg.get();

    if (*show) {
      char* text = nullptr;
      check(adb_config_serialize(c, &text));
      std::fputs(text, stdout);
      adb_string_free(text);
      return kExitOk;
    }
    if (*l_sim) {
      adb_pulse_metrics m{};
      const auto path = out_file(c, "laser_trace.csv");
      check(adb_laser_simulate(c, path.c_str(), &m));
      std::printf("peak_power_W %.9g\npeak_time_s %.9g\nfwhm_s %.9g\ntotal_out_J %.9g\n", m.peak_power_w,
                  m.peak_time_s, m.fwhm_s, m.total_out_j);
      return kExitOk;
    }
    if (*l_se) {
      const auto path = out_file(c, "laser_sweep_energy.csv");
      check(adb_laser_sweep_energy(c, path.c_str()));
      std::printf("wrote %s\n", path.c_str());
      return kExitOk;
    }
    if (*l_sd) {
      const auto path = out_file(c, "laser_sweep_dt.csv");
      check(adb_laser_sweep_dt(c, path.c_str()));
      std::printf("wrote %s\n", path.c_str());
      return kExitOk;
    }
    if (*tun) {
      set_if(c, "tunnel.u_ev", u_ev);
      set_if(c, "tunnel.e_ev", e_ev);
      set_if(c, "tunnel.width_m", width_m);
      adb_tunnel_result r{};
      const auto path = out_file(c, "tunnel.csv");
      check(adb_tunnel_run(c, path.c_str(), &r));
      std::printf("k2_per_m %.9g\nexponent %.9g\nT %.9g\n", r.k2_per_m, r.exponent, r.transmission);
      return kExitOk;
    }
    if (*o_run) {
      adb_optimizer_report r{};
      const auto path = out_file(c, "optimize_run.csv");
      check(adb_optimize_run(c, path.c_str(), &r));
      std::printf("best_id %llu\nbest_energy %.17g\ncomparisons %llu\nescapes %llu\n",
                  static_cast<unsigned long long>(r.best_id), r.best_energy,
                  static_cast<unsigned long long>(r.comparisons), static_cast<unsigned long long>(r.escapes));
      return kExitOk;
    }
    if (*o_scale) {
      adb_scaling_summary s{};
      const auto path = out_file(c, "optimize_scaling.csv");
      check(adb_optimize_scaling(c, path.c_str(), &s));
      std::printf("runs %llu\nbound_violations %llu\nr2_vs_ln_n %.6f\n", static_cast<unsigned long long>(s.runs),
                  static_cast<unsigned long long>(s.bound_violations), s.r2);
      return s.bound_violations == 0 ? kExitOk : kExitFail;
    }
    if (*d_run) {
      const auto iters = out_file(c, "dmft_iterations.csv");
      const auto green = out_file(c, "dmft_green.csv");
      adb_dmft_result* r = nullptr;
      const adb_status s = adb_dmft_run(c, iters.c_str(), green.c_str(), &r);
      if (r) {
        std::printf("iterations %zu\nresidual %.3e\nconverged %s\n", adb_dmft_iterations(r), adb_dmft_residual(r),
                    adb_dmft_converged(r) ? "yes" : "no");
        adb_dmft_free(r);
      }
      check(s);
      return kExitOk;
    }
    if (*repro) {
      adb_manifest* m = nullptr;
      check(adb_reproduce(c, &m));
      for (std::size_t i = 0; i < adb_manifest_size(m); ++i) {
        adb_manifest_entry e{};
        adb_manifest_entry_at(m, i, &e);
        std::printf("%-7s %-6s %s\n", e.table, e.status, e.output_file);
        if (e.detail[0]) std::printf("        %s\n", e.detail);
      }
      const bool ok = adb_manifest_all_pass(m);
      adb_manifest_free(m);
      return ok ? kExitOk : kExitFail;
    }
  } catch (const Failure& f) {
    const char* msg = adb_last_error();
    if (msg && *msg) std::fprintf(stderr, "error (%s): %s\n", adb_status_name(f.status), msg);
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSoftware;
  }
  return kExitUsage;
}
