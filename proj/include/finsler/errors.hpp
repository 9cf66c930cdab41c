#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsler {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside its real domain (sqrt/ln of a
/// non-positive value, division by a zero-valued jet, ...).
class SingularEvaluation : public Error {
 public:
  SingularEvaluation(const std::string& what, double offending)
      : Error(what + " (value " + std::to_string(offending) + ")"), value_(offending) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// A sample lies outside the metric's declared domain (y = 0, |x| >= 1 for
/// Funk, beta <= 0 for Kropina, b^2 >= 1 for Randers, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Raised while parsing the expression language.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error("parse error at offset " + std::to_string(offset) + ": " + msg), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A metric or volume specification violates one of its invariants.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// The fundamental tensor (or alpha) is not positive definite, or is too
/// badly conditioned to be trusted.
class DegenerateTensor : public Error {
 public:
  DegenerateTensor(const std::string& msg, double smallest_eigenvalue)
      : Error(msg), smallest_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_; }

 private:
  double smallest_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
