#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A query left the chart on which a metric is defined (e.g. |x| >= 1 for Funk).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The fundamental tensor failed to be symmetric positive definite.
class MetricValidityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite integrand samples, failed solves and similar numerical breakdowns.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Requested something the toolkit deliberately does not provide (k >= 2, n > 3).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a reversible metric.
class ReversibilityError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis of the computation does not hold for the input.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Bad arguments from a caller (wrong dimension, empty lists, out-of-range values).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
