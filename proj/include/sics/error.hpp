#ifndef SICS_ERROR_HPP
#define SICS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sics {

/// Base class for every error raised by the solver library.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
  virtual const char* name() const noexcept { return "SolverError"; }
};

class InvalidInput : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "InvalidInput"; }
};

class NotPositiveDefinite : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "NotPositiveDefinite"; }
};

class NotPositiveDefiniteUpdate : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "NotPositiveDefiniteUpdate"; }
};

class DegenerateCurvature : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "DegenerateCurvature"; }
};

class LineSearchFailed : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "LineSearchFailed"; }
};

class NonPositiveDiagonal : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "NonPositiveDiagonal"; }
};

class DegenerateSamples : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "DegenerateSamples"; }
};

class IOError : public SolverError {
public:
  using SolverError::SolverError;
  const char* name() const noexcept override { return "IOError"; }
};

} // namespace sics

#endif // SICS_ERROR_HPP
