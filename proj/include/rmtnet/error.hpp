#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmt {

enum class Errc {
  UnknownKind,
  NegativeQuantity,
  MissingField,
  MalformedField,
  InvariantViolation,
  NonPositivePrice,
  NonPositiveVolume,
  EventBeforeEpoch,
  EmptyGraph,
  KTooLarge,
  NoData,
  TooFewSamples,
  DegenerateSamples,
  ZeroVariance,
  LengthMismatch,
  NoPriceData,
  ConfigInvalid,
  IoError,
};

const char* errc_name(Errc code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// One malformed input row. Line numbers are 1-based and refer to the
/// physical line the record started on.
struct ParseError {
  std::size_t line = 0;
  Errc code = Errc::MalformedField;
  std::string message;
};

/// Parse output: whatever was readable plus a report of what was not.
template <typename T>
struct Parsed {
  std::vector<T> items;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

}  // namespace rmt
