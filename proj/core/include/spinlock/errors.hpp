#pragma once

#include <stdexcept>
#include <string>

namespace spinlock {

// Base class for everything this library throws on purpose. Callers that
// want a single catch site can catch Error; the subclasses exist so tests
// and the CLI can map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Configuration / input validation problems (bad units, unknown keys,
// negative rates, mismatched dimensions of user-supplied data).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operands with incompatible or unsupported matrix dimensions.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A matrix that was supposed to be a physical state is not one
// (non-Hermitian, trace != 1, or negative eigenvalue beyond tolerance).
class InvalidStateError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// The limit cycle is undefined when both the gain and the damping rate
// vanish: nothing restores the populations.
class UndefinedLimitCycleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical failures: the computation ran but did not produce a usable
// answer. The CLI maps these to a distinct exit code.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IntegrationDivergedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonUniqueSteadyStateError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Resolvent (H_nh - E - omega)^{-1} is singular or near-singular for a
// specific coupling; the message names the (field, level) pair.
class ResonanceError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Requested the locked phase of a drive that has nothing to lock to
// (equal gain and damping rates give zero contrast for every drive).
class NoPhasePreferenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class FitFailedError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Phase extraction found no signal at the reference frequency.
class NoCarrierError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Tomography pulse set does not span the Bloch sphere.
class IllConditionedDesignError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace spinlock
