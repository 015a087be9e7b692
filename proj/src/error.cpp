#include "rmtnet/error.hpp"

namespace rmt {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::UnknownKind: return "UnknownKind";
    case Errc::NegativeQuantity: return "NegativeQuantity";
    case Errc::MissingField: return "MissingField";
    case Errc::MalformedField: return "MalformedField";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::NonPositivePrice: return "NonPositivePrice";
    case Errc::NonPositiveVolume: return "NonPositiveVolume";
    case Errc::EventBeforeEpoch: return "EventBeforeEpoch";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::NoData: return "NoData";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::DegenerateSamples: return "DegenerateSamples";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NoPriceData: return "NoPriceData";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace rmt
