#pragma once

#include <stdexcept>
#include <string>

namespace mqg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical data with a nonzero spatial mean; homogeneous multipliers are
/// undefined on constants.
struct NonZeroMean : Error {
  using Error::Error;
};

/// Inverse transform produced an imaginary residue above tolerance.
struct BrokenSymmetry : Error {
  using Error::Error;
};

struct JOutOfRange : Error {
  using Error::Error;
};

struct BadShellPair : Error {
  using Error::Error;
};

/// Non-finite values or runaway growth during time stepping.
struct BlowUp : Error {
  using Error::Error;
};

struct SinkFailure : Error {
  using Error::Error;
};

struct DegenerateField : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct SnapshotError : Error {
  using Error::Error;
};

}  // namespace mqg
