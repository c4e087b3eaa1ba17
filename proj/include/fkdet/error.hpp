#pragma once

#include <stdexcept>
#include <string>

namespace fkdet {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Usage = 1,      // malformed input, dangling names, bad arguments
  Numerical = 2,  // eigensolver non-convergence, non-Hermitian input
  Resource = 3,   // term or enumeration caps exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
  throw Error(ErrorKind::Usage, what);
}

[[noreturn]] inline void fail_numerical(const std::string& what) {
  throw Error(ErrorKind::Numerical, what);
}

[[noreturn]] inline void fail_resource(const std::string& what) {
  throw Error(ErrorKind::Resource, what);
}

}  // namespace fkdet
