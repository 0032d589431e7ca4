#pragma once

#include <stdexcept>
#include <string>

namespace ehrelay {

/// Base of every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  explicit InvalidParams(const std::string& what) : Error("invalid parameters: " + what) {}
};

class InvalidThreshold : public Error {
 public:
  explicit InvalidThreshold(const std::string& what) : Error("invalid threshold: " + what) {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, long iterations)
      : Error("no convergence: " + what + " after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}
  long iterations() const { return iterations_; }

 private:
  long iterations_;
};

class Unstable : public Error {
 public:
  explicit Unstable(const std::string& what) : Error("unstable data queue: " + what) {}
};

class SingularBoundary : public Error {
 public:
  explicit SingularBoundary(const std::string& what) : Error("singular boundary system: " + what) {}
};

class SingularChain : public Error {
 public:
  explicit SingularChain(const std::string& what) : Error("singular chain: " + what) {}
};

class NonAbsorbing : public Error {
 public:
  explicit NonAbsorbing(const std::string& what) : Error("non-absorbing chain: " + what) {}
};

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(const std::string& what) : Error("validation failed: " + what) {}
};

}  // namespace ehrelay
