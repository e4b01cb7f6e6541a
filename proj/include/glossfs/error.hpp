#pragma once

#include <stdexcept>
#include <string>

namespace glossfs {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  Numerical,
};

// Every failure raised by the core library. The C API maps kind() onto its
// status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace glossfs
