#pragma once

#include <stdexcept>
#include <string>

namespace forgetlab {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor/matrix shape disagreements.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values (arch specs, experiment configs, builder args).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operation called in a state that does not admit it (no active head, duplicate head id).
class StateError : public Error {
 public:
  using Error::Error;
};

// Bad runtime data (labels out of range, non-finite inputs).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed on-disk formats (CIFAR files, snapshot containers).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Probe-specific failures (fingerprint mismatch, degenerate activations).
class ProbeError : public Error {
 public:
  using Error::Error;
};

// Numeric breakdown (divergence, non-convergence, non-finite results).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Snapshot/architecture incompatibility.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Violated operation precondition (e.g. non-orthogonal rotation basis).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace forgetlab
