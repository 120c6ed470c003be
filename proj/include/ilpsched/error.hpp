#pragma once

#include <stdexcept>
#include <string>

namespace ilpsched {

// Failure categories surfaced by the library. Configuration-class codes are
// turned into usage errors (exit 2) by the CLI; the rest are runtime errors.
enum class Errc {
  dimension_mismatch,
  window_too_large,
  window_not_dividing_quantum,
  non_positive_parameter,
  capacity_below_max_ilp,
  index_out_of_range,
  value_out_of_range,
  length_mismatch,
  unknown_policy,
  instance_too_large,
  negative_demand,
  state_mismatch,
  parse_error,
  invariant_violation,
  spec_out_of_range,
  empty_input,
  io_error,
};

inline const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::window_too_large: return "WindowTooLarge";
    case Errc::window_not_dividing_quantum: return "WindowNotDividingQuantum";
    case Errc::non_positive_parameter: return "NonPositiveParameter";
    case Errc::capacity_below_max_ilp: return "CapacityBelowMaxIlp";
    case Errc::index_out_of_range: return "IndexOutOfRange";
    case Errc::value_out_of_range: return "ValueOutOfRange";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::unknown_policy: return "UnknownPolicy";
    case Errc::instance_too_large: return "InstanceTooLarge";
    case Errc::negative_demand: return "NegativeDemand";
    case Errc::state_mismatch: return "StateMismatch";
    case Errc::parse_error: return "ParseError";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::spec_out_of_range: return "SpecOutOfRange";
    case Errc::empty_input: return "EmptyInput";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

class SchedError : public std::runtime_error {
 public:
  SchedError(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ilpsched
