// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fcoo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes (rows, columns, extents, order) are inconsistent.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A size computation would overflow its integer type or exceed a guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed `.tns` or binary tensor file, or an I/O failure.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument that is not a shape problem (bad mode, bad option).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed (flag mismatch, double write).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure such as non-finite values during a decomposition.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace fcoo
