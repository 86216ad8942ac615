#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace affordance {

/// Base of every error raised by the library. The CLI maps `ConfigError`
/// to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class LoadError : public IoError {
 public:
  using IoError::IoError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class ChannelError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class DivergedError : public Error {
 public:
  DivergedError(int epoch, int step, const std::string& what)
      : Error("training diverged at epoch " + std::to_string(epoch) + ", step " +
              std::to_string(step) + ": " + what),
        epoch_(epoch),
        step_(step) {}
  int epoch() const { return epoch_; }
  int step() const { return step_; }

 private:
  int epoch_;
  int step_;
};

/// Wraps a failure of one seed of a multi-seed run.
class SeedError : public Error {
 public:
  SeedError(std::uint64_t seed, const std::string& what)
      : Error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class AggregationError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Raised when the rule-based classifier cannot read a generated scene.
/// On generator output this never happens unless the generator is broken.
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace affordance
