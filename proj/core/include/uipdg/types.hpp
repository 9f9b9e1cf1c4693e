// Common geometric types and the error taxonomy shared across the library.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace uipdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct BoundingBox {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user-facing configuration (bad key, bad value, inconsistent setup).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Malformed input file; the message carries the source line number.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Mesh fails a structural check (orientation, conformity, duplicate faces).
class TopologyError : public Error {
public:
  using Error::Error;
};

/// A linear solve failed to reach the requested tolerance, or a local block
/// was singular during condensation.
class SolverError : public Error {
public:
  using Error::Error;
};

/// A requested verification (equivalence table, self check) did not hold.
class CheckError : public Error {
public:
  using Error::Error;
};

} // namespace uipdg
