#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credal {

enum class ErrorCode {
  InvalidArgument,
  InvalidCredence,
  UnsupportedMeasure,
  NotImplemented,
  AllAtomsInfinite,
  NotConverged,
};

/// Stable kebab-case name used in CLI reports and exit diagnostics.
std::string_view error_name(ErrorCode code);

class CredalError : public std::runtime_error {
 public:
  CredalError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw CredalError(code, what);
}

}  // namespace credal
