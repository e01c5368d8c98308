#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace agone {

// Base class for all harness errors. `code()` is the stable machine-readable
// identifier the CLI emits in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define AGONE_DEFINE_ERROR(Name)                      \
  class Name : public ::agone::Error {                \
   public:                                            \
    explicit Name(const std::string& message)         \
        : ::agone::Error(#Name, message) {}           \
  }

}  // namespace agone
