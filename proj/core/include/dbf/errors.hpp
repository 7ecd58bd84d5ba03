#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dbf {

/* Integrity violations inside the simulator. These indicate a caller bug
   (an agent picking an invalid slot is handled as a normal step, never as
   an exception). */
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InsufficientCoresError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

class TimeRegressionError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/* Input data problems: unreadable trace files, malformed lines, traces too
   short for the requested episode. */
class WorkloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/* Configuration rejects carry the offending field name so the CLI can point
   at the exact key. */
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/* Checkpoint loading distinguishes unreadable files, wrong format versions,
   and tensors whose shapes do not match the target policy. */
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class ShapeMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* Raised when a policy update produces NaN or infinite loss; the update is
   abandoned and parameters are left as they were. */
class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dbf
