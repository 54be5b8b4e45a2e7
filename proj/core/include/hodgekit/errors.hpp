#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hodgekit {

/// Machine-readable failure categories. Each maps to a stable string used in
/// CLI error reports.
enum class ErrorCode {
  degree,          // degree index out of range
  shape,           // cochain degree/complex/length mismatch
  topology,        // non-closed, non-orientable or duplicate input
  geometry,        // degenerate simplex
  scheme,          // metric scheme not applicable to this mesh
  numerical,       // solver failure or rank ambiguity
  not_exact,       // primitive requested for a non-exact cochain
  parameter,       // invalid scalar parameter (s, k, trials, ...)
  hypothesis,      // norm-chain hypothesis s > k + n/2 violated
  grid,            // parameter grid missing neighbours or too coarse
  capability,      // registry entry lacks a required derivative
  domain,          // input outside an operation's domain (e.g. oracle mesh)
  mesh_unreadable,
  cochain_malformed,
  unknown_registry,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hodgekit
