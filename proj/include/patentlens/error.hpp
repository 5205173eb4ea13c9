#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patentlens {

/// Coarse failure classes. The API layer maps these onto HTTP statuses and
/// the CLI onto exit codes, so new values need a mapping in both places.
enum class Errc {
  invalid_argument,
  not_found,
  insufficient_data,
  schema_mismatch,
  numerical,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace patentlens
