#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsin {

/// Input failed a precondition (out-of-range parameter, length mismatch, ...).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A surrogate parameter sits at the origin, where the frequency is undefined.
class DegenerateParameterError : public std::domain_error {
public:
  DegenerateParameterError(std::size_t index, const std::string& what)
      : std::domain_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// The optimizer saw a non-finite gradient.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// Least-squares design matrix is (numerically) rank deficient.
class ConditioningError : public std::runtime_error {
public:
  ConditioningError(std::size_t first, std::size_t second, const std::string& what)
      : std::runtime_error(what), first_(first), second_(second) {}
  std::size_t first_column() const noexcept { return first_; }
  std::size_t second_column() const noexcept { return second_; }

private:
  std::size_t first_;
  std::size_t second_;
};

/// Malformed text input. `line` is 1-based; `offset` is a byte offset into the source.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t offset, const std::string& what)
      : std::runtime_error(what), line_(line), offset_(offset) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t line_;
  std::size_t offset_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace wsin
