#pragma once

#include <stdexcept>
#include <string>

namespace platetopo {

enum class ErrorCode {
  Argument = 1,
  Domain,
  Geometry,
  DegenerateGradient,
  NoClosure,
  SingularSystem,
  DegenerateStep,
  Io,
};

// Base exception for every failure raised by the library. The code maps
// one-to-one onto the status values of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::Argument, what);
}

}  // namespace platetopo
