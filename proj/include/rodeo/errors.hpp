#pragma once
// Error taxonomy shared across the library. Every failure mode that callers
// are expected to branch on gets its own type.

#include <stdexcept>
#include <string>
#include <vector>

namespace rodeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionUnsupported : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class NonFiniteStrategyOutput : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Step size violates a sampling or accuracy guard.
class StepTooLarge : public Error {
 public:
  StepTooLarge(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_ = 0.0;
};

// A jump rate went negative where only non-negative rates are handled.
class NegativeRate : public Error {
 public:
  NegativeRate(const std::string& what, double time, int eigenindex, double rate)
      : Error(what), time_(time), eigenindex_(eigenindex), rate_(rate) {}
  double time() const { return time_; }
  int eigenindex() const { return eigenindex_; }
  double rate() const { return rate_; }

 private:
  double time_ = 0.0;
  int eigenindex_ = -1;
  double rate_ = 0.0;
};

// Configuration rejected; carries every issue found, not just the first.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "config rejected:";
    for (const auto& s : issues) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace rodeo
