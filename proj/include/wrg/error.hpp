#pragma once

#include <stdexcept>
#include <string>

namespace wrg {

enum class Errc {
  invalid_parameters,
  retry_budget_exceeded,
  vertex_out_of_range,
  mask_length_mismatch,
  domain_error,
  size_exceeded,
  empty_matrix,
  simplex_violation,
  parse_error,
  io_error,
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameters: return "invalid-parameters";
    case Errc::retry_budget_exceeded: return "retry-budget-exceeded";
    case Errc::vertex_out_of_range: return "vertex-out-of-range";
    case Errc::mask_length_mismatch: return "mask-length-mismatch";
    case Errc::domain_error: return "domain-error";
    case Errc::size_exceeded: return "size-exceeded";
    case Errc::empty_matrix: return "empty-matrix";
    case Errc::simplex_violation: return "simplex-violation";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

/// Library error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace wrg
