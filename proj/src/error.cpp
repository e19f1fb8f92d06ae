#include "svol/error.hpp"

namespace svol {

const char* to_string(Errc c) noexcept {
  switch (c) {
    case Errc::StationarityViolation: return "StationarityViolation";
    case Errc::NonPositiveSigma: return "NonPositiveSigma";
    case Errc::CorrelationOutOfRange: return "CorrelationOutOfRange";
    case Errc::KindConstraintViolation: return "KindConstraintViolation";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooShort: return "TooShort";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::EmptyChain: return "EmptyChain";
    case Errc::NonFiniteLikelihood: return "NonFiniteLikelihood";
    case Errc::PriorSupportViolation: return "PriorSupportViolation";
    case Errc::ParseError: return "ParseError";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::NonMonotoneDates: return "NonMonotoneDates";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace svol
