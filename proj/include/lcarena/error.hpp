#pragma once

#include <stdexcept>
#include <string>

namespace lcarena {

/// Error raised by every module. `code()` is a short machine-readable tag
/// (e.g. "missing_curve", "invalid_action") that the CLI prints verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace lcarena
