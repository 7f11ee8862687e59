#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmine {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed query text; offset is the byte position of the offending token.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  [[nodiscard]] std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Confidence literal outside [0, 1].
class RangeError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Every disjunct of the query is unsatisfiable.
class EmptyQuery : public Error {
 public:
  EmptyQuery() : Error("query is unsatisfiable") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ParamError : public Error {
 public:
  using Error::Error;
};

/// Phase 2 needed a support that personality derivation did not supply.
class MissingSupport : public Error {
 public:
  using Error::Error;
};

/// Two different exact supports were reported for the same itemset.
class ConflictError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration refused: too many distinct items.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// Post-processing materialization exceeded its itemset budget.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A post-processing session cannot answer a support threshold below its floor.
class FloorViolation : public Error {
 public:
  using Error::Error;
};

/// A query ran past its deadline.
class Timeout : public Error {
 public:
  Timeout() : Error("query exceeded its time limit") {}
};

}  // namespace qmine
