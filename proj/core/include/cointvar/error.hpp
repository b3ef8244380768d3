#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cointvar {

enum class ErrorKind {
  kInvalidInput,
  kInsufficientData,
  kInsufficientHistory,
  kInsufficientRange,
  kSingularDesign,
  kSingularMoment,
  kInvalidRank,
  kInvalidSpec,
  kDegenerateVariance,
  kParse,
  kSchema,
  kNoOverlap,
  kIo,
};

// Stable, user-facing name of an error kind ("singular-design", ...).
std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

// Raised when the least-squares design is rank deficient or its condition
// number exceeds the configured threshold.
class SingularDesignError : public Error {
 public:
  SingularDesignError(const std::string& message, double condition)
      : Error(ErrorKind::kSingularDesign, message), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(ErrorKind::kParse, message + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cointvar
