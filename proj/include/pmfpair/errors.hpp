#pragma once

#include <stdexcept>
#include <string>

namespace pmfpair {

// Bad user input: malformed config files, unknown keys, unreadable data
// files. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation that cannot produce a valid result: failed root bracketing,
// degenerate fits, non-physical intermediate states. The CLI maps this (and
// std::domain_error from precondition checks) to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmfpair
