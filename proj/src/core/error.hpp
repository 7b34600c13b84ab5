#pragma once

#include <stdexcept>
#include <string>

namespace adiabench {

enum class Errc {
  invalid_argument,
  config,
  numeric_instability,
  no_pulse,
  ordering,
  above_barrier,
  division,
  degenerate_gap,
  no_admissible_gap,
  schedule,
  validation,
  causality,
  singularity,
  grid_too_small,
  not_converged,
  io,
  schema,
  internal,
};

const char* errc_name(Errc code) noexcept;

// Every failure raised by the core carries one of the codes above; the C API
// maps them one-to-one onto adb_status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace adiabench
