#pragma once

#include <stdexcept>
#include <string>

namespace dunkl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid preset, dimension, multiplicity or harness configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a mathematical function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for a root system the implementation cannot handle
/// (e.g. closed-form kernel for a non-product reflection group).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Improper integral whose exponent configuration diverges.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Requested evaluation lies outside the accuracy envelope of a plan.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Integrand produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace dunkl
