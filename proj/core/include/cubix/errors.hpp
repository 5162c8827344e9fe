#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cubix {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wire anchor and exit point (nearly) coincide, so the wire has no direction.
class DegenerateWire : public Error {
 public:
  DegenerateWire(std::size_t wire, double separation)
      : Error("wire " + std::to_string(wire) + " is degenerate (separation " +
              std::to_string(separation) + " m)"),
        wire_(wire) {}
  std::size_t wire() const { return wire_; }

 private:
  std::size_t wire_;
};

/// Active-set QP hit its iteration cap without satisfying the KKT conditions.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Relative rotation too close to pi for the rotation-vector chart.
class RotationTooLarge : public Error {
 public:
  using Error::Error;
};

/// Simulated body velocity exceeded the configured bound.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

class NoClearance : public Error {
 public:
  using Error::Error;
};

class TrackingTimeout : public Error {
 public:
  using Error::Error;
};

/// Winding number requested for an open or degenerate loop.
class Ambiguous : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A scenario field violates its constraints. `field()` is the dotted path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace cubix
