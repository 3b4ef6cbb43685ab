#pragma once

#include <stdexcept>
#include <string>

namespace flns {

/// Base class of every failure raised by the solvers and the harness.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mass in the outermost velocity layer exceeds the containment threshold.
class TailOverflow : public Error {
 public:
  using Error::Error;
};

/// Requested time step violates the stability bound of an explicit substep.
class CflViolation : public Error {
 public:
  using Error::Error;
};

class LinearSolveFailure : public Error {
 public:
  using Error::Error;
};

/// Density dropped below the no-vacuum floor of the hydrodynamic comparison.
class VacuumBreach : public Error {
 public:
  using Error::Error;
};

/// A functional that relies on the unit-mass normalization got a different mass.
class NonUnitMass : public Error {
 public:
  using Error::Error;
};

/// A checked identity or inequality failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace flns
