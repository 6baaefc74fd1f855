#pragma once

#include <stdexcept>
#include <string>

namespace hnodal {

/// Failure categories. Each maps onto a CLI exit code.
enum class ErrorKind { Domain, Accuracy, Capacity, Range };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return 2;
    case ErrorKind::Range: return 2;
    case ErrorKind::Accuracy: return 3;
    case ErrorKind::Capacity: return 4;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

/// Pi(x,x) below the degeneracy threshold: the origin with odd N, or
/// forbidden-region underflow.
class DegenerateKernel : public DomainError {
 public:
  DegenerateKernel(const std::string& what, double pi)
      : DomainError(what), pi_(pi) {}
  double pi() const noexcept { return pi_; }

 private:
  double pi_;
};

/// A numerical error bound exceeded its requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double bound)
      : Error(ErrorKind::Accuracy, what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, double requested)
      : Error(ErrorKind::Capacity, what), requested_(requested) {}
  double requested() const noexcept { return requested_; }

 private:
  double requested_;
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorKind::Range, what) {}
};

}  // namespace hnodal
