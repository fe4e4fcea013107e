#pragma once

#include <stdexcept>
#include <string>

namespace riesz {

/// Argument outside the mathematical domain of an operation (x <= 0 for
/// gamma, alpha outside (0, n), negative weights, ...).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A discretisation would exceed the configured resolution or memory budget,
/// or is too coarse to resolve the object it represents.
class ResolutionError : public std::runtime_error {
public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested operation is not available for this input (e.g. FFT sampling of
/// an atomic measure).
class UnsupportedError : public std::invalid_argument {
public:
  explicit UnsupportedError(const std::string& what) : std::invalid_argument(what) {}
};

/// Least-squares fit without enough spread in the data to define a slope.
class DegenerateFitError : public std::runtime_error {
public:
  explicit DegenerateFitError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file; the message carries the line number.
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace riesz
