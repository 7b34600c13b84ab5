#include "adiabench/adiabench.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/workbench.hpp"

using namespace adiabench;

struct adb_config {
  config::RunConfig cfg;
  std::string output_dir;  // stable storage for adb_config_output_dir
};

struct adb_model {
  opt::EnergyModel model;
};

struct adb_dmft_result {
  dmft::DmftState state;
};

struct adb_manifest {
  workbench::ReproManifest manifest;
};

namespace {

thread_local std::string g_last_error;

adb_status to_status(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return ADB_INVALID_ARGUMENT;
    case Errc::config: return ADB_CONFIG;
    case Errc::numeric_instability: return ADB_NUMERIC_INSTABILITY;
    case Errc::no_pulse: return ADB_NO_PULSE;
    case Errc::ordering: return ADB_ORDERING;
    case Errc::above_barrier: return ADB_ABOVE_BARRIER;
    case Errc::division: return ADB_DIVISION;
    case Errc::degenerate_gap: return ADB_DEGENERATE_GAP;
    case Errc::no_admissible_gap: return ADB_NO_ADMISSIBLE_GAP;
    case Errc::schedule: return ADB_SCHEDULE;
    case Errc::validation: return ADB_VALIDATION;
    case Errc::causality: return ADB_CAUSALITY;
    case Errc::singularity: return ADB_SINGULARITY;
    case Errc::grid_too_small: return ADB_GRID_TOO_SMALL;
    case Errc::not_converged: return ADB_NOT_CONVERGED;
    case Errc::io: return ADB_IO;
    case Errc::schema: return ADB_SCHEMA;
    case Errc::internal: return ADB_INTERNAL;
  }
  return ADB_INTERNAL;
}

adb_status set_error(adb_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn and turns every exception into a status code.
template <class Fn>
adb_status guarded(Fn&& fn) noexcept {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::out_of_range& e) {
    return set_error(ADB_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ADB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ADB_INTERNAL, e.what());
  } catch (...) {
    return set_error(ADB_INTERNAL, "unknown exception");
  }
}

#define REQUIRE(ptr)                                                            \
  do {                                                                          \
    if (!(ptr)) return set_error(ADB_INVALID_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

adb_optimizer_report to_c(const opt::OptimizerReport& r) {
  return {r.best_id, r.best_energy, r.visited_count, r.comparison_count, r.escape_count, r.candidate_count, r.seed};
}

adb_status wrap_config(config::RunConfig cfg, adb_config** out) {
  auto* h = new adb_config{std::move(cfg), {}};
  h->output_dir = h->cfg.output_dir;
  *out = h;
  return ADB_OK;
}

}  // namespace

extern "C" {

const char* adb_last_error(void) { return g_last_error.c_str(); }

const char* adb_status_name(adb_status s) {
  if (s == ADB_OK) return "ok";
  if (s < ADB_OK || s > ADB_INTERNAL) return "unknown";
  return errc_name(static_cast<Errc>(static_cast<int>(s) - 1));
}

adb_status adb_config_default(adb_config** out) {
  return guarded([&] {
    REQUIRE(out);
    return wrap_config(config::RunConfig{}, out);
  });
}

adb_status adb_config_parse(const char* text, adb_config** out) {
  return guarded([&] {
    REQUIRE(text);
    REQUIRE(out);
    return wrap_config(config::parse_config(text), out);
  });
}

adb_status adb_config_load(const char* path, adb_config** out) {
  return guarded([&] {
    REQUIRE(path);
    REQUIRE(out);
    return wrap_config(config::load_config(path), out);
  });
}

adb_status adb_config_set(adb_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(key);
    REQUIRE(value);
    config::set_value(cfg->cfg, key, value);
    cfg->output_dir = cfg->cfg.output_dir;
    return ADB_OK;
  });
}

adb_status adb_config_set_seed(adb_config* cfg, uint64_t seed) {
  return guarded([&] {
    REQUIRE(cfg);
    cfg->cfg.seed = seed;
    return ADB_OK;
  });
}

adb_status adb_config_set_output_dir(adb_config* cfg, const char* dir) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(dir);
    if (!*dir) return set_error(ADB_CONFIG, "output directory must not be empty");
    cfg->cfg.output_dir = dir;
    cfg->output_dir = dir;
    return ADB_OK;
  });
}

uint64_t adb_config_seed(const adb_config* cfg) { return cfg ? cfg->cfg.seed : 0; }

const char* adb_config_output_dir(const adb_config* cfg) { return cfg ? cfg->output_dir.c_str() : ""; }

adb_status adb_config_serialize(const adb_config* cfg, char** out) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(out);
    const std::string text = config::serialize(cfg->cfg);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
    return ADB_OK;
  });
}

void adb_string_free(char* s) { delete[] s; }

void adb_config_free(adb_config* cfg) { delete cfg; }

adb_status adb_laser_simulate(const adb_config* cfg, const char* csv_path, adb_pulse_metrics* out) {
  return guarded([&] {
    REQUIRE(cfg);
    const auto& c = cfg->cfg;
    const auto m = csv_path ? workbench::write_laser_trace(c.laser.model, c.laser.trace_stride, csv_path)
                            : laser::simulate_metrics(c.laser.model);
    if (out) *out = {m.peak_power, m.peak_time, m.fwhm_width, m.total_out_energy};
    return ADB_OK;
  });
}

adb_status adb_laser_sweep_energy(const adb_config* cfg, const char* csv_path) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(csv_path);
    const auto& c = cfg->cfg;
    workbench::write_sweep(laser::sweep_energy(c.laser.model, c.laser.energies), "e_in_J", csv_path);
    return ADB_OK;
  });
}

adb_status adb_laser_sweep_dt(const adb_config* cfg, const char* csv_path) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(csv_path);
    const auto& c = cfg->cfg;
    workbench::write_sweep(laser::sweep_timestep(c.laser.model, c.laser.dts), "dt_s", csv_path);
    return ADB_OK;
  });
}

adb_status adb_tunnel_transmission(double u_ev, double e_ev, double width_m, double mass_kg,
                                   adb_tunnel_result* out) {
  return guarded([&] {
    REQUIRE(out);
    const auto r = tunnel::transmission(tunnel::TunnelBarrier::from_ev(u_ev, e_ev, width_m, mass_kg));
    *out = {r.k2, r.exponent, r.transmission};
    return ADB_OK;
  });
}

adb_status adb_tunnel_run(const adb_config* cfg, const char* csv_path, adb_tunnel_result* out) {
  return guarded([&] {
    REQUIRE(cfg);
    const auto b = config::tunnel_barrier(cfg->cfg);
    const auto r = tunnel::transmission(b);
    if (csv_path) csv::emit_csv(workbench::tunnel_rows(b, r), workbench::tunnel_schema(), csv_path);
    if (out) *out = {r.k2, r.exponent, r.transmission};
    return ADB_OK;
  });
}

adb_status adb_barrier_height_bohr(double z_eff, unsigned n1, unsigned n2, double* ev) {
  return guarded([&] {
    REQUIRE(ev);
    *ev = tunnel::barrier_height_bohr(z_eff, n1, n2);
    return ADB_OK;
  });
}

adb_status adb_average_electron_energy(double total_j, double count, double fraction, double* ev) {
  return guarded([&] {
    REQUIRE(ev);
    *ev = tunnel::average_electron_energy(total_j, count, fraction);
    return ADB_OK;
  });
}

adb_status adb_model_from_table(const double* energies, size_t n, adb_model** out) {
  return guarded([&] {
    REQUIRE(out);
    if (n > 0) REQUIRE(energies);
    *out = new adb_model{opt::EnergyModel::from_table(std::vector<double>(energies, energies + n))};
    return ADB_OK;
  });
}

adb_status adb_model_from_ising(unsigned sites, const double* couplings, double transverse_field, adb_model** out) {
  return guarded([&] {
    REQUIRE(out);
    REQUIRE(couplings);
    opt::IsingSpec spec{sites, {}, transverse_field};
    for (unsigned i = 0; i < sites; ++i) {
      for (unsigned j = 0; j < sites; ++j) {
        const double v = couplings[static_cast<std::size_t>(i) * sites + j];
        if (v != 0.0) spec.couplings.push_back({i, j, v});
      }
    }
    *out = new adb_model{opt::EnergyModel::from_ising(spec)};
    return ADB_OK;
  });
}

adb_status adb_model_from_config(const adb_config* cfg, adb_model** out) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(out);
    *out = new adb_model{opt::reduce(config::landscape(cfg->cfg))};
    return ADB_OK;
  });
}

uint64_t adb_model_size(const adb_model* m) { return m ? m->model.config_count() : 0; }

adb_status adb_model_energy(const adb_model* m, uint64_t id, double* out) {
  return guarded([&] {
    REQUIRE(m);
    REQUIRE(out);
    *out = m->model.energy(id);
    return ADB_OK;
  });
}

void adb_model_free(adb_model* m) { delete m; }

adb_status adb_optimize_run(const adb_config* cfg, const char* csv_path, adb_optimizer_report* out) {
  return guarded([&] {
    REQUIRE(cfg);
    const auto& c = cfg->cfg;
    const auto r = opt::run_pipeline(config::landscape(c), config::pipeline_options(c), c.seed);
    if (csv_path) {
      csv::emit_csv({workbench::optimize_run_row(r)}, workbench::optimize_run_schema(), csv_path);
    }
    if (out) *out = to_c(r);
    return ADB_OK;
  });
}

adb_status adb_optimize_greedy(const adb_model* m, uint64_t seed, adb_optimizer_report* out) {
  return guarded([&] {
    REQUIRE(m);
    REQUIRE(out);
    *out = to_c(opt::greedy(m->model, seed));
    return ADB_OK;
  });
}

adb_status adb_optimize_evolve(const adb_model* m, const adb_config* cfg, uint64_t seed, adb_optimizer_report* out) {
  return guarded([&] {
    REQUIRE(m);
    REQUIRE(cfg);
    REQUIRE(out);
    const auto p = config::pipeline_options(cfg->cfg);
    const auto gap = opt::select_gap(p.gaps, p.min_transition, p.min_stability);
    const auto schedule = opt::map_schedule(gap, p.drive_energy, p.safety, p.steps_per_time);
    opt::EvolveOptions eo;
    eo.candidates = p.candidates;
    *out = to_c(opt::evolve(m->model, schedule, p.barrier, seed, eo));
    return ADB_OK;
  });
}

adb_status adb_optimize_scaling(const adb_config* cfg, const char* csv_path, adb_scaling_summary* out) {
  return guarded([&] {
    REQUIRE(cfg);
    const auto& c = cfg->cfg;
    std::vector<std::uint64_t> sizes;
    for (double s : c.optimize.scaling_sizes) sizes.push_back(static_cast<std::uint64_t>(s));
    const auto result = opt::scaling_experiment(sizes, static_cast<std::uint32_t>(c.optimize.scaling_trials), c.seed,
                                                config::pipeline_options(c));
    if (csv_path) workbench::write_scaling(result, csv_path);
    if (out) {
      std::vector<double> xs, ys;
      for (const auto& r : result.rows) {
        xs.push_back(static_cast<double>(r.n));
        ys.push_back(r.mean_comparisons);
      }
      out->runs = result.runs;
      out->bound_violations = result.bound_violations;
      out->r2 = xs.size() >= 2 ? opt::log_fit_r2(xs, ys) : 0.0;
    }
    return ADB_OK;
  });
}

adb_status adb_dmft_run(const adb_config* cfg, const char* iterations_csv, const char* green_csv,
                        adb_dmft_result** out) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(out);
    *out = nullptr;
    std::vector<csv::Row> rows;
    auto state = dmft::self_consistency_loop(config::hubbard_params(cfg->cfg), config::loop_options(cfg->cfg),
                                             [&](const dmft::DmftState& s) {
                                               rows.push_back(workbench::dmft_iteration_row(s));
                                             });
    if (iterations_csv) csv::emit_csv(rows, workbench::dmft_iteration_schema(), iterations_csv);
    if (green_csv) {
      std::vector<csv::Row> g;
      for (std::size_t n = 0; n < state.g_imp.size(); ++n) {
        g.push_back({state.g_imp.frequency(n), state.g_imp.values[n].real(), state.g_imp.values[n].imag(),
                     state.sigma.values[n].real(), state.sigma.values[n].imag()});
      }
      csv::emit_csv(g, workbench::dmft_green_schema(), green_csv);
    }
    const bool converged = state.converged;
    const double residual = state.residual;
    *out = new adb_dmft_result{std::move(state)};
    if (!converged) {
      return set_error(ADB_NOT_CONVERGED, "no convergence within max_iter; last residual " + std::to_string(residual));
    }
    return ADB_OK;
  });
}

size_t adb_dmft_iterations(const adb_dmft_result* r) { return r ? r->state.iteration : 0; }

double adb_dmft_residual(const adb_dmft_result* r) { return r ? r->state.residual : 0.0; }

int adb_dmft_converged(const adb_dmft_result* r) { return r && r->state.converged ? 1 : 0; }

size_t adb_dmft_size(const adb_dmft_result* r) { return r ? r->state.g_imp.size() : 0; }

adb_status adb_dmft_g_imp(const adb_dmft_result* r, size_t n, double* re, double* im) {
  return guarded([&] {
    REQUIRE(r);
    const auto v = r->state.g_imp.values.at(n);
    if (re) *re = v.real();
    if (im) *im = v.imag();
    return ADB_OK;
  });
}

adb_status adb_dmft_sigma(const adb_dmft_result* r, size_t n, double* re, double* im) {
  return guarded([&] {
    REQUIRE(r);
    const auto v = r->state.sigma.values.at(n);
    if (re) *re = v.real();
    if (im) *im = v.imag();
    return ADB_OK;
  });
}

void adb_dmft_free(adb_dmft_result* r) { delete r; }

adb_status adb_reproduce(const adb_config* cfg, adb_manifest** out) {
  return guarded([&] {
    REQUIRE(cfg);
    REQUIRE(out);
    *out = new adb_manifest{workbench::reproduce(cfg->cfg)};
    return ADB_OK;
  });
}

size_t adb_manifest_size(const adb_manifest* m) { return m ? m->manifest.entries.size() : 0; }

adb_status adb_manifest_entry_at(const adb_manifest* m, size_t i, adb_manifest_entry* out) {
  return guarded([&] {
    REQUIRE(m);
    REQUIRE(out);
    const auto& e = m->manifest.entries.at(i);
    *out = {e.table.c_str(), e.output_file.c_str(), workbench::status_name(e.status), e.tolerance.c_str(),
            e.detail.c_str()};
    return ADB_OK;
  });
}

int adb_manifest_all_pass(const adb_manifest* m) { return m && m->manifest.all_pass() ? 1 : 0; }

void adb_manifest_free(adb_manifest* m) { delete m; }

}  // extern "C"
