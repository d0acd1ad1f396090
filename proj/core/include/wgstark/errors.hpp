#pragma once

#include <stdexcept>
#include <string>

namespace wgstark {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Curvature evaluated too close to a singularity of its analytic continuation.
class DegenerateEvaluation : public Error {
 public:
  using Error::Error;
};

/// The tube coordinates break down (1 + u*gamma close to zero).
class GeometryViolation : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// Field direction outside the regime an operation requires.
class RegimeMismatch : public Error {
 public:
  using Error::Error;
};

/// Field direction on one of the excluded boundaries |eta| = pi/2, |eta - alpha0| = pi/2.
class BoundaryDirection : public Error {
 public:
  using Error::Error;
};

/// Invalid arguments or a violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Sparse factorization of a shifted matrix failed.
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Run configuration could not be parsed or validated.  `path` names the
/// offending key (dotted), empty when the whole document is at fault.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace wgstark
