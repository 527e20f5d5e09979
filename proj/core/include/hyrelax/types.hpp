#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyrelax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Mode and edge handles are positions in HybridSystem::modes / ::edges.
/// The user-facing labels from the system file live in Mode::id / Edge::id.
using ModeIndex = std::size_t;
using EdgeIndex = std::size_t;

enum class ErrorCategory {
  Config,     // malformed system file, unknown field kind, bad parameter
  Geometry,   // singular change of basis, inconsistent reset
  Domain,     // operation called outside its region of definition
  Numeric,    // non-finite values, budget exhaustion
  Filippov,   // reference solution does not exist
  Chart,      // sensitivity through a reset
  Io,         // missing or unreadable file
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error(ErrorCategory::Geometry, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Domain, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

/// Raised when the Filippov reference solution is undefined (escaping or
/// tangential contact, Zeno accumulation).
class FilippovUndefined : public Error {
 public:
  explicit FilippovUndefined(const std::string& what) : Error(ErrorCategory::Filippov, what) {}
};

class UnsupportedChart : public Error {
 public:
  explicit UnsupportedChart(const std::string& what) : Error(ErrorCategory::Chart, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

std::string format_vec(const Vec& v);

}  // namespace hyrelax
