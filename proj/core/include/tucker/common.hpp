#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tucker {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Per-mode extents (n1, n2, n3) or (r1, r2, r3).
using Dims = std::array<int, 3>;

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape or index inconsistency between arguments.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A core unfolding Gram matrix G_d G_d^T failed the positive-definiteness
/// check; the point sits too close to a lower-rank stratum.
class DegenerateCoreError : public Error {
public:
  using Error::Error;
};

/// An iterative inner solver did not reach its tolerance.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Filesystem failure (missing file, unwritable path).
class IoError : public Error {
public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

}  // namespace tucker
