#pragma once

#include <stdexcept>
#include <string>

namespace seglab {

// Mirrors the exit-code contract of the command line tool.
enum class ErrorKind {
  invalid_argument,
  config,
  unconverged,
  invariant,
  io,
  domain,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace seglab
