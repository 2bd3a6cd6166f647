#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field evaluated to a non-finite value, or was asked for a point
/// outside its domain (y = 0, sigma <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

/// y is (nearly) parallel to +-b^i, so q <= q_min and the 1/q terms are refused.
class NearCollinearError : public Error {
 public:
  using Error::Error;
};

/// |s| too close to 1 for the s-generating function.
class NearSingularError : public Error {
 public:
  using Error::Error;
};

/// Finsleroid charge outside the open interval (-2, 2).
class ChargeRangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
