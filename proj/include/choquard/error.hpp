#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Domain error carrying a short machine-readable code ("zero-field",
/// "singular-diagonal", "dirichlet-only", ...) next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace choquard
