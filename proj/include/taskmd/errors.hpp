#pragma once

#include <stdexcept>
#include <string>

namespace taskmd {

// Exit codes used by the command line tool. Library code throws the typed
// exceptions below; main() maps them to these codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitPhysicsError = 2,
  kExitVerifyMismatch = 3,
};

// Invalid or inconsistent input: bad config keys, geometry that cannot hold
// the requested decomposition, parameter combinations rejected at setup.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The simulation reached a state the model cannot represent: coincident
// particles, an overstretched bond, a degenerate angle, non-finite values.
// Messages include the step and the particle ids involved where known.
class PhysicsError : public std::runtime_error {
 public:
  explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

// Engine output disagreed with the reference calculation.
class VerifyError : public std::runtime_error {
 public:
  explicit VerifyError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency violations (stale snapshots, mismatched ghost plans).
// These indicate a bug in the caller's sequencing, not bad user input.
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace taskmd
