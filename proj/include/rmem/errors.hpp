#pragma once

#include <stdexcept>
#include <string>

namespace rmem {

enum class errc {
  invalid_argument,
  degenerate_initial_height,
  forbidden_initial_height,
  singular_evaluation,
  no_boundary_data,
  not_admissible,
  non_positive_radius,
  non_positive_modulus,
  c0_zero,
  empty_range,
  lost_bracket,
  budget_exceeded,
  window_empty,
  degenerate_resolution,
  step_failure,
  io_failure,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::degenerate_initial_height: return "degenerate_initial_height";
    case errc::forbidden_initial_height: return "forbidden_initial_height";
    case errc::singular_evaluation: return "singular_evaluation";
    case errc::no_boundary_data: return "no_boundary_data";
    case errc::not_admissible: return "not_admissible";
    case errc::non_positive_radius: return "non_positive_radius";
    case errc::non_positive_modulus: return "non_positive_modulus";
    case errc::c0_zero: return "c0_zero";
    case errc::empty_range: return "empty_range";
    case errc::lost_bracket: return "lost_bracket";
    case errc::budget_exceeded: return "budget_exceeded";
    case errc::window_empty: return "window_empty";
    case errc::degenerate_resolution: return "degenerate_resolution";
    case errc::step_failure: return "step_failure";
    case errc::io_failure: return "io_failure";
  }
  return "unknown";
}

/// Library error carrying a machine-checkable code alongside the message.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

  /// Input/domain problems exit a CLI with status 1, numerical failures with 2.
  bool is_usage_error() const noexcept {
    switch (code_) {
      case errc::invalid_argument:
      case errc::degenerate_initial_height:
      case errc::forbidden_initial_height:
      case errc::non_positive_radius:
      case errc::non_positive_modulus:
      case errc::c0_zero:
      case errc::empty_range:
      case errc::degenerate_resolution:
        return true;
      default:
        return false;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace rmem
