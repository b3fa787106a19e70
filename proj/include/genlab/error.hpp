#pragma once

#include <stdexcept>
#include <string>

namespace genlab {

// Caller broke a documented precondition (bad arguments, malformed config,
// out-of-range parameters). Maps to CLI exit code 1.
class ContractError : public std::runtime_error {
public:
  explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem or stream failure. Maps to CLI exit code 1.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file content (net files, dataset files). A ContractError
// subtype so generic handlers treat it as a caller-input problem.
class ParseError : public ContractError {
public:
  explicit ParseError(const std::string& msg) : ContractError(msg) {}
};

// A mathematical guarantee that the code promises to uphold was observed
// to fail at runtime. This is always a bug in the artifact, never user
// error. Maps to CLI exit code 2.
class HardAssertionError : public std::logic_error {
public:
  explicit HardAssertionError(const std::string& msg) : std::logic_error(msg) {}
};

inline void hard_assert(bool ok, const std::string& msg) {
  if (!ok) throw HardAssertionError(msg);
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ContractError(msg);
}

}  // namespace genlab
