// Error taxonomy shared by all modules.
//
// Exceptions carry the failure class the callers (scenario runner, C shim)
// map onto process exit codes: configuration problems exit 1, violated
// numerical invariants exit 2.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace modal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural misuse: unknown subsystem names, dimension mismatches,
// name collisions, out-of-range block indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A numerical invariant (trace, positivity, unitarity, normalization)
// failed beyond its tolerance.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Joint outcome probabilities are only defined for pairwise disjoint systems.
class OverlappingSystems : public Error {
 public:
  using Error::Error;
};

// Conditioning on an outcome whose probability is numerically zero.
class ZeroProbabilityBranch : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration; carries one message per offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += "\n";
      s += e;
    }
    return s;
  }
  std::vector<std::string> issues_;
};

}  // namespace modal
