#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ncps {

// Every throwing code path carries a stable machine-readable code so the
// CLI can map failures to exit codes and JSON error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

namespace errc {
inline constexpr const char* invalid_parameter = "INVALID_PARAMETER";
inline constexpr const char* origin_singularity = "ORIGIN_SINGULARITY";
inline constexpr const char* step_overflow = "STEP_OVERFLOW";
inline constexpr const char* non_winding = "NON_WINDING";
inline constexpr const char* direction_reversal = "DIRECTION_REVERSAL";
inline constexpr const char* no_circular_orbit = "NO_CIRCULAR_ORBIT";
inline constexpr const char* degenerate_frequency = "DEGENERATE_FREQUENCY";
inline constexpr const char* division_error = "DIVISION_ERROR";
inline constexpr const char* zero_parameter = "ZERO_PARAMETER";
inline constexpr const char* gamma_constraint = "GAMMA_CONSTRAINT";
inline constexpr const char* constraint_violation = "CONSTRAINT_VIOLATION";
inline constexpr const char* no_solution = "NO_SOLUTION";
inline constexpr const char* non_unit_axis = "NON_UNIT_AXIS";
inline constexpr const char* degenerate_sampler = "DEGENERATE_SAMPLER";
inline constexpr const char* excessive_rejection = "EXCESSIVE_REJECTION";
}  // namespace errc

}  // namespace ncps
