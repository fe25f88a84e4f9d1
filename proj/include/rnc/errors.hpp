#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rnc {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pair of moduli shares a factor. Reports the first offending pair in the
/// order the caller supplied them.
class NotCoprimeError : public Error {
 public:
  NotCoprimeError(std::uint64_t a, std::uint64_t b)
      : Error("moduli are not pairwise coprime: gcd(" + std::to_string(a) +
              ", " + std::to_string(b) + ") > 1"),
        first_(a),
        second_(b) {}
  std::uint64_t first() const noexcept { return first_; }
  std::uint64_t second() const noexcept { return second_; }

 private:
  std::uint64_t first_;
  std::uint64_t second_;
};

class ModulusTooSmallError : public Error {
 public:
  explicit ModulusTooSmallError(std::uint64_t m)
      : Error("modulus must be at least 2, got " + std::to_string(m)),
        value_(m) {}
  std::uint64_t value() const noexcept { return value_; }

 private:
  std::uint64_t value_;
};

/// The product of the moduli does not fit the 64-bit value word.
class DynamicRangeTooLargeError : public Error {
 public:
  DynamicRangeTooLargeError()
      : Error("product of moduli exceeds the 64-bit dynamic range") {}
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// An encoded value was combined with a ModuliSet other than the one that
/// produced it.
class ModuliMismatchError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class UnderflowError : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

class NoModularInverseError : public Error {
 public:
  using Error::Error;
};

/// Cross-key filtering needs reports from at least two distinct keys.
class NeedTwoKeysError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTypeError : public Error {
 public:
  using Error::Error;
};

/// Runtime fault inside the IR interpreter (e.g. division by zero).
class TrapError : public Error {
 public:
  using Error::Error;
};

}  // namespace rnc
