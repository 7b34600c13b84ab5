#pragma once

// File-level operations behind the CLI: each one runs a module and writes its
// CSV artifact. `reproduce` regenerates every table and a manifest.

#include <filesystem>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/csv.hpp"

namespace adiabench::workbench {

namespace fs = std::filesystem;

csv::Schema trace_schema();
csv::Schema sweep_schema(const std::string& x_column);
csv::Schema tunnel_schema();
csv::Schema optimize_run_schema();
csv::Schema scaling_schema();
csv::Schema dmft_iteration_schema();
csv::Schema dmft_green_schema();
csv::Schema manifest_schema();

// Every `stride`-th sample of the trace; returns the pulse metrics of the
// full-resolution run.
laser::PulseMetrics write_laser_trace(const laser::LaserConfig& cfg, std::uint64_t stride, const fs::path& path);

// Trailing `status` column is "ok" or the row's error message.
void write_sweep(const std::vector<laser::SweepRow>& rows, const std::string& x_column, const fs::path& path);

std::vector<csv::Row> tunnel_rows(const tunnel::TunnelBarrier& b, const tunnel::TunnelResult& r);
csv::Row optimize_run_row(const opt::OptimizerReport& r);
void write_scaling(const opt::ScalingResult& result, const fs::path& path);
void write_dmft(const dmft::DmftState& state, const fs::path& iterations_path, const fs::path& green_path,
                const std::vector<csv::Row>& iteration_rows);
csv::Row dmft_iteration_row(const dmft::DmftState& s);

enum class Status { pass, trend, fail };
const char* status_name(Status s);

struct ManifestEntry {
  std::string table;
  std::string output_file;
  Status status = Status::fail;
  std::string tolerance;
  std::string detail;
};

struct ReproManifest {
  std::vector<ManifestEntry> entries;

  bool all_pass() const;
};

// Creates the output directory and verifies it is writable; Errc::io
// otherwise.
void prepare_output_dir(const fs::path& dir);

// Writes table1_width.csv, table2_ramp.csv, table3_energy.csv, table3_dt.csv,
// table4_scaling.csv and manifest.csv under cfg.output_dir. Every file is a
// pure function of the configuration and seed.
ReproManifest reproduce(const config::RunConfig& cfg);

// Table-1 "time evolution" labels and the widths (ns) printed beside them.
struct Table1Row {
  double label;
  double width_ns;
};
std::vector<Table1Row> table1_reference();

// Table-2 (time, energy) pairs.
std::vector<std::pair<double, double>> table2_reference();

}  // namespace adiabench::workbench
