#pragma once

#include <stdexcept>
#include <string>

namespace qlimit {

enum class ErrorCode {
  invalid_argument,
  grid_mismatch,
  domain_mismatch,
  off_grid,
  not_normalized,
  config,
  io,
  internal,
};

// Single exception type for the core; the C API maps `code()` onto status
// values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qlimit
