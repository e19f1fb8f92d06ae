#pragma once

#include <stdexcept>
#include <string>

namespace svol {

enum class Errc {
  StationarityViolation,
  NonPositiveSigma,
  CorrelationOutOfRange,
  KindConstraintViolation,
  LengthMismatch,
  TooShort,
  DegenerateSeries,
  EmptyChain,
  NonFiniteLikelihood,
  PriorSupportViolation,
  ParseError,
  NonPositivePrice,
  NonMonotoneDates,
  EmptyInput,
  ConfigError,
};

const char* to_string(Errc c) noexcept;

/// Exception carrying a machine-checkable error code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace svol
