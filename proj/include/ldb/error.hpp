#pragma once

#include <stdexcept>
#include <string>

namespace ldb {

enum class ErrorKind {
  EntryOutOfRange,
  ShapeMismatch,
  NotOneDimensional,
  NotSorted,
  DimensionMismatch,
  SizeMismatch,
  RejectionStarvation,
  InvalidRequest,
  InvalidArgs,
  InvalidParams,
  FamilyTooLarge,
  CdfNotMonotone,
  IndexOutOfRange,
  InvalidRank,
  NoCollision,
  DivergenceDetected,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ldb
