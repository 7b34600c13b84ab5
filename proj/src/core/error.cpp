#include "core/error.hpp"

namespace adiabench {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::config: return "configuration error";
    case Errc::numeric_instability: return "numeric instability";
    case Errc::no_pulse: return "no pulse";
    case Errc::ordering: return "level ordering error";
    case Errc::above_barrier: return "above-barrier energy";
    case Errc::division: return "division error";
    case Errc::degenerate_gap: return "degenerate gap";
    case Errc::no_admissible_gap: return "no admissible gap";
    case Errc::schedule: return "inadmissible schedule";
    case Errc::validation: return "validation error";
    case Errc::causality: return "causality violation";
    case Errc::singularity: return "singular Green's function";
    case Errc::grid_too_small: return "grid too small";
    case Errc::not_converged: return "not converged";
    case Errc::io: return "I/O error";
    case Errc::schema: return "schema error";
    case Errc::internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace adiabench
