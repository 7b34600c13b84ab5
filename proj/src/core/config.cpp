#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "core/error.hpp"

namespace adiabench::config {

std::vector<double> table3_energies() {
  return {140e-6, 150e-6, 200e-6, 250e-6, 500e-6, 1000e-6, 1500e-6, 2000e-6, 2500e-6, 3000e-6, 3500e-6, 4000e-6};
}

std::vector<double> table3_timesteps() {
  return {5e-12,    2.5e-12,  1e-12,    0.1e-12,  0.09e-12, 0.08e-12, 0.07e-12,
          0.06e-12, 0.05e-12, 0.04e-12, 0.03e-12, 0.02e-12, 0.01e-12, 0.005e-12};
}

std::vector<double> table4_sizes() {
  return {3000, 5000, 10000, 20000, 30000, 40000, 50000, 60000, 70000, 80000, 90000, 100000};
}

namespace {

[[noreturn]] void diag(int line, const std::string& what) {
  std::ostringstream os;
  if (line > 0) {
    os << "line " << line << ": " << what;
  } else {
    os << what;
  }
  fail(Errc::config, os.str());
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view v, int line, const std::string& key) {
  v = trim(v);
  double out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    diag(line, key + ": expected a number, got '" + std::string(v) + "'");
  }
  if (!std::isfinite(out)) diag(line, key + ": value must be finite");
  return out;
}

std::uint64_t parse_count(std::string_view v, int line, const std::string& key) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    diag(line, key + ": expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return out;
}

std::vector<double> parse_list(std::string_view v, int line, const std::string& key) {
  std::vector<double> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    out.push_back(parse_real(item, line, key));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string parse_text(std::string_view v, int line, const std::string& key) {
  v = trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) ++i;
      out += v[i];
    }
    return out;
  }
  if (v.find('"') != std::string_view::npos) diag(line, key + ": unbalanced quote");
  return std::string(v);
}

std::string fmt_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += fmt_real(xs[i]);
  }
  return s;
}

std::string fmt_text(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + "\"";
}

// A constraint returns an empty string when the value is acceptable.
using Check = std::function<std::string(double)>;

Check positive() {
  return [](double v) { return v > 0 ? "" : "must be > 0"; };
}
Check non_negative() {
  return [](double v) { return v >= 0 ? "" : "must be >= 0"; };
}
Check at_least_one() {
  return [](double v) { return v >= 1 ? "" : "must be >= 1"; };
}
Check open_unit() {
  return [](double v) { return v > 0 && v < 1 ? "" : "must lie in (0, 1)"; };
}
Check half_open_unit() {
  return [](double v) { return v > 0 && v <= 1 ? "" : "must lie in (0, 1]"; };
}
Check any() {
  return [](double) { return std::string(); };
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Key real_key(std::string name, Access access, Check check) {
  return {name,
          [=](RunConfig& c, std::string_view v, int line) {
            const double x = parse_real(v, line, name);
            if (auto msg = check(x); !msg.empty()) diag(line, name + " " + msg);
            access(c) = x;
          },
          [=](const RunConfig& c) { return fmt_real(access(const_cast<RunConfig&>(c))); }};
}

template <class Access>
Key count_key(std::string name, Access access, Check check) {
  return {name,
          [=](RunConfig& c, std::string_view v, int line) {
            const std::uint64_t x = parse_count(v, line, name);
            if (auto msg = check(static_cast<double>(x)); !msg.empty()) diag(line, name + " " + msg);
            access(c) = x;
          },
          [=](const RunConfig& c) { return std::to_string(access(const_cast<RunConfig&>(c))); }};
}

template <class Access>
Key list_key(std::string name, Access access, Check check) {
  return {name,
          [=](RunConfig& c, std::string_view v, int line) {
            auto xs = parse_list(v, line, name);
            for (double x : xs) {
              if (auto msg = check(x); !msg.empty()) diag(line, name + " entries " + msg);
            }
            access(c) = std::move(xs);
          },
          [=](const RunConfig& c) { return fmt_list(access(const_cast<RunConfig&>(c))); }};
}

#define FIELD(path) [](RunConfig& c) -> auto& { return c.path; }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"format_version",
                 [](RunConfig& c, std::string_view v, int line) {
                   const auto x = parse_count(v, line, "format_version");
                   if (x != kFormatVersion) diag(line, "format_version must be 1");
                   c.format_version = static_cast<int>(x);
                 },
                 [](const RunConfig& c) { return std::to_string(c.format_version); }});
    k.push_back({"output_dir",
                 [](RunConfig& c, std::string_view v, int line) {
                   c.output_dir = parse_text(v, line, "output_dir");
                   if (c.output_dir.empty()) diag(line, "output_dir must not be empty");
                 },
                 [](const RunConfig& c) { return fmt_text(c.output_dir); }});
    k.push_back(count_key("seed", FIELD(seed), any()));

    k.push_back(real_key("laser.c", FIELD(laser.model.c), positive()));
    k.push_back(real_key("laser.lambda_pump", FIELD(laser.model.lambda_pump), positive()));
    k.push_back(real_key("laser.lambda_laser", FIELD(laser.model.lambda_laser), positive()));
    k.push_back(real_key("laser.r1", FIELD(laser.model.r1), open_unit()));
    k.push_back(real_key("laser.r2", FIELD(laser.model.r2), half_open_unit()));
    k.push_back(real_key("laser.beam_area", FIELD(laser.model.beam_area), positive()));
    k.push_back(real_key("laser.cavity_len", FIELD(laser.model.cavity_len), positive()));
    k.push_back(real_key("laser.gain_len", FIELD(laser.model.gain_len), positive()));
    k.push_back(real_key("laser.sigma_se", FIELD(laser.model.sigma_se), positive()));
    k.push_back(real_key("laser.dt", FIELD(laser.model.dt), positive()));
    k.push_back(real_key("laser.eta1", FIELD(laser.model.eta1), positive()));
    k.push_back(real_key("laser.h", FIELD(laser.model.h), positive()));
    k.push_back(real_key("laser.e_in", FIELD(laser.model.e_in), positive()));
    k.push_back(real_key("laser.pump_vol", FIELD(laser.model.pump_vol), positive()));
    k.push_back(real_key("laser.phi0", FIELD(laser.model.phi0), non_negative()));
    k.push_back(count_key("laser.steps", FIELD(laser.model.steps), any()));
    k.push_back(real_key("laser.inversion_factor", FIELD(laser.model.inversion_factor), positive()));
    k.push_back(list_key("laser.energies", FIELD(laser.energies), positive()));
    k.push_back(list_key("laser.dts", FIELD(laser.dts), positive()));
    k.push_back(count_key("laser.trace_stride", FIELD(laser.trace_stride), at_least_one()));

    k.push_back(real_key("tunnel.u_ev", FIELD(tunnel.u_ev), positive()));
    k.push_back(real_key("tunnel.e_ev", FIELD(tunnel.e_ev), non_negative()));
    k.push_back(real_key("tunnel.width_m", FIELD(tunnel.width_m), non_negative()));
    k.push_back(real_key("tunnel.mass_kg", FIELD(tunnel.mass_kg), positive()));
    k.push_back(real_key("tunnel.hbar", FIELD(tunnel.hbar), positive()));

    k.push_back({"optimize.model",
                 [](RunConfig& c, std::string_view v, int line) {
                   auto m = parse_text(v, line, "optimize.model");
                   if (m != "table" && m != "ising") diag(line, "optimize.model must be 'table' or 'ising'");
                   c.optimize.model = m;
                 },
                 [](const RunConfig& c) { return fmt_text(c.optimize.model); }});
    k.push_back(list_key("optimize.table", FIELD(optimize.table), any()));
    k.push_back(count_key("optimize.table_size", FIELD(optimize.table_size), any()));
    k.push_back(count_key("optimize.spins", FIELD(optimize.spins), [](double v) {
      return v >= 1 && v <= opt::kMaxIsingSites ? "" : "must lie in [1, 63]";
    }));
    k.push_back(real_key("optimize.transverse_field", FIELD(optimize.transverse_field), non_negative()));
    k.push_back(list_key("optimize.gap_values", FIELD(optimize.gap_values), positive()));
    k.push_back(list_key("optimize.gap_transition_times", FIELD(optimize.gap_transition_times), non_negative()));
    k.push_back(list_key("optimize.gap_stability", FIELD(optimize.gap_stability), any()));
    k.push_back(real_key("optimize.min_transition", FIELD(optimize.min_transition), any()));
    k.push_back(real_key("optimize.min_stability", FIELD(optimize.min_stability), any()));
    k.push_back(real_key("optimize.drive_energy", FIELD(optimize.drive_energy), positive()));
    k.push_back(real_key("optimize.safety", FIELD(optimize.safety), at_least_one()));
    k.push_back(real_key("optimize.steps_per_time", FIELD(optimize.steps_per_time), positive()));
    k.push_back(real_key("optimize.energy_scale_ev", FIELD(optimize.energy_scale_ev), positive()));
    k.push_back(real_key("optimize.length_scale_m", FIELD(optimize.length_scale_m), positive()));
    k.push_back(real_key("optimize.particle_energy_ev", FIELD(optimize.particle_energy_ev), non_negative()));
    k.push_back(count_key("optimize.restarts", FIELD(optimize.restarts), at_least_one()));
    k.push_back(list_key("optimize.scaling_sizes", FIELD(optimize.scaling_sizes), [](double v) {
      return v >= 1 && v == std::floor(v) ? "" : "must be positive integers";
    }));
    k.push_back(count_key("optimize.scaling_trials", FIELD(optimize.scaling_trials), at_least_one()));

    k.push_back(real_key("dmft.t", FIELD(dmft.t), positive()));
    k.push_back(real_key("dmft.u", FIELD(dmft.u), non_negative()));
    k.push_back(real_key("dmft.beta", FIELD(dmft.beta), positive()));
    k.push_back({"dmft.mu",
                 [](RunConfig& c, std::string_view v, int line) { c.dmft.mu = parse_real(v, line, "dmft.mu"); },
                 [](const RunConfig& c) { return c.dmft.mu ? fmt_real(*c.dmft.mu) : std::string(); }});
    k.push_back(real_key("dmft.alpha", FIELD(dmft.alpha), positive()));
    k.push_back(count_key("dmft.max_iter", FIELD(dmft.max_iter), at_least_one()));
    k.push_back(real_key("dmft.mixing", FIELD(dmft.mixing), half_open_unit()));
    k.push_back(count_key("dmft.n_freq", FIELD(dmft.n_freq), [](double v) { return v >= 8 ? "" : "must be >= 8"; }));
    k.push_back(count_key("dmft.n_tau", FIELD(dmft.n_tau), any()));
    return k;
  }();
  return table;
}

#undef FIELD

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;

    // Strip a comment that starts outside a quoted value.
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) diag(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) diag(line_no, "missing key before '='");

    const auto& ks = keys();
    const auto it = std::find_if(ks.begin(), ks.end(), [&](const Key& k) { return k.name == key; });
    if (it == ks.end()) diag(line_no, "unknown key '" + key + "'");
    if (auto [prev, inserted] = seen.emplace(key, line_no); !inserted) {
      diag(line_no, "key '" + key + "' already set on line " + std::to_string(prev->second));
    }
    if (value.empty() && key != "dmft.mu") diag(line_no, key + ": missing value");
    if (key == "dmft.mu" && value.empty()) {
      cfg.dmft.mu.reset();
      continue;
    }
    it->set(cfg, value, line_no);
  }
  validate(cfg);
  return cfg;
}

void set_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& ks = keys();
  const auto it = std::find_if(ks.begin(), ks.end(), [&](const Key& k) { return k.name == key; });
  if (it == ks.end()) diag(0, "unknown key '" + std::string(key) + "'");
  RunConfig next = cfg;
  if (key == "dmft.mu" && trim(value).empty()) {
    next.dmft.mu.reset();
  } else {
    if (trim(value).empty()) diag(0, std::string(key) + ": missing value");
    it->set(next, value, 0);
  }
  validate(next);
  cfg = std::move(next);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    if (e.code() == Errc::config) fail(Errc::config, path + ": " + e.what());
    throw;
  }
}

std::string serialize(const RunConfig& cfg) {
  std::string out = "# adiabench run configuration\n";
  for (const auto& k : keys()) {
    const std::string v = k.get(cfg);
    if (k.name == "dmft.mu" && v.empty()) continue;
    out += k.name + " = " + v + "\n";
  }
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.format_version != kFormatVersion) fail(Errc::config, "format_version must be 1");
  try {
    laser::derive_params(cfg.laser.model);
  } catch (const Error& e) {
    fail(Errc::config, std::string("laser section: ") + e.what());
  }
  const auto& o = cfg.optimize;
  if (o.gap_values.empty()) fail(Errc::config, "optimize.gap_values must list at least one gap");
  if (o.gap_transition_times.size() != o.gap_values.size() || o.gap_stability.size() != o.gap_values.size()) {
    fail(Errc::config, "optimize.gap_values, gap_transition_times and gap_stability must have equal length");
  }
  if (o.model == "table" && o.table_size == 0 && o.table.empty()) {
    fail(Errc::config, "optimize.table is empty and optimize.table_size is 0");
  }
  if (o.scaling_sizes.empty()) fail(Errc::config, "optimize.scaling_sizes must not be empty");
  if (cfg.dmft.n_tau != 0 && cfg.dmft.n_tau < 2 * cfg.dmft.n_freq) {
    fail(Errc::config, "dmft.n_tau must be 0 (automatic) or >= 2 * dmft.n_freq");
  }
  if (cfg.dmft.mu && std::abs(*cfg.dmft.mu - 0.5 * cfg.dmft.u) > 1e-12) {
    fail(Errc::config, "dmft.mu must equal dmft.u / 2 (the solver works at half filling)");
  }
}

opt::PipelineOptions pipeline_options(const RunConfig& cfg) {
  const auto& o = cfg.optimize;
  opt::PipelineOptions p;
  p.gaps.clear();
  for (std::size_t i = 0; i < o.gap_values.size(); ++i) {
    p.gaps.push_back({o.gap_values[i], o.gap_transition_times[i], o.gap_stability[i]});
  }
  p.min_transition = o.min_transition;
  p.min_stability = o.min_stability;
  p.drive_energy = o.drive_energy;
  p.safety = o.safety;
  p.steps_per_time = o.steps_per_time;
  p.barrier.energy_scale_ev = o.energy_scale_ev;
  p.barrier.length_scale_m = o.length_scale_m;
  p.barrier.particle_energy_ev = o.particle_energy_ev;
  p.candidates.restarts = static_cast<std::uint32_t>(o.restarts);
  return p;
}

opt::Landscape landscape(const RunConfig& cfg) {
  const auto& o = cfg.optimize;
  if (o.model == "ising") {
    return opt::random_ising(static_cast<unsigned>(o.spins), cfg.seed, o.transverse_field);
  }
  if (o.table_size > 0) return opt::random_table(o.table_size, cfg.seed);
  return o.table;
}

dmft::HubbardParams hubbard_params(const RunConfig& cfg) {
  dmft::HubbardParams p;
  p.t = cfg.dmft.t;
  p.u = cfg.dmft.u;
  p.beta = cfg.dmft.beta;
  p.mu = cfg.dmft.mu.value_or(0.5 * cfg.dmft.u);
  return p;
}

dmft::LoopOptions loop_options(const RunConfig& cfg) {
  dmft::LoopOptions o;
  o.alpha = cfg.dmft.alpha;
  o.max_iter = cfg.dmft.max_iter;
  o.mixing = cfg.dmft.mixing;
  o.n_freq = cfg.dmft.n_freq;
  o.n_tau = cfg.dmft.n_tau;
  return o;
}

tunnel::TunnelBarrier tunnel_barrier(const RunConfig& cfg) {
  auto b = tunnel::TunnelBarrier::from_ev(cfg.tunnel.u_ev, cfg.tunnel.e_ev, cfg.tunnel.width_m, cfg.tunnel.mass_kg);
  b.hbar = cfg.tunnel.hbar;
  return b;
}

}  // namespace adiabench::config
