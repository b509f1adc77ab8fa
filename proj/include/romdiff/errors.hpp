// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace romdiff {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration / schema problems. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem and serialization problems. Maps to CLI exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

class FormatVersionError : public IoError {
 public:
  using IoError::IoError;
};

class ChecksumError : public IoError {
 public:
  using IoError::IoError;
};

// Numerical failures below map to CLI exit code 3.

/// A pivot fell below the singularity threshold during factorization.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& msg, long pivot_index)
      : Error(msg), pivot_index(pivot_index) {}
  long pivot_index;  // -1 when the backend does not report one
};

/// Iterative kernel exceeded its internal iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Every candidate column was dropped during orthonormalization.
class EmptyBasisError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix extents disagree (also covers prefactor/basis rank mismatch).
class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidMaterialError : public Error {
 public:
  using Error::Error;
};

class InvalidBoundsError : public Error {
 public:
  using Error::Error;
};

/// B*u vanished inside the power iteration (no fission source).
class BreakdownError : public Error {
 public:
  using Error::Error;
};

/// Requested POD rank exceeds the number of snapshots.
class RankError : public Error {
 public:
  using Error::Error;
};

/// |<c*, A_n c>| fell below threshold; eta_k unavailable for this query.
class DegenerateDenominatorError : public Error {
 public:
  using Error::Error;
};

/// An input set (training, prefactor, ...) is empty or fully degenerate.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

}  // namespace romdiff
