#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace propest {

enum class Errc {
  // data / validation
  InvalidFrame,
  DegenerateAttribute,
  DegenerateAuxiliary,
  ZeroMean,
  InvalidDesign,
  DuplicateIndex,
  IndexOutOfRange,
  ZeroSampleMean,
  NonpositiveTransform,
  NonpositiveBase,
  InvalidParams,
  TooLarge,
  DegenerateGeneration,
  ParseError,
  SchemaError,
  IoError,
  // numerical
  DegenerateMoments,
  SingularSystem,
  NegativeMse,
  NonpositiveMse,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::DegenerateAttribute: return "DegenerateAttribute";
    case Errc::DegenerateAuxiliary: return "DegenerateAuxiliary";
    case Errc::ZeroMean: return "ZeroMean";
    case Errc::InvalidDesign: return "InvalidDesign";
    case Errc::DuplicateIndex: return "DuplicateIndex";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ZeroSampleMean: return "ZeroSampleMean";
    case Errc::NonpositiveTransform: return "NonpositiveTransform";
    case Errc::NonpositiveBase: return "NonpositiveBase";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::TooLarge: return "TooLarge";
    case Errc::DegenerateGeneration: return "DegenerateGeneration";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::IoError: return "IoError";
    case Errc::DegenerateMoments: return "DegenerateMoments";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NegativeMse: return "NegativeMse";
    case Errc::NonpositiveMse: return "NonpositiveMse";
  }
  return "Unknown";
}

/// True for failures of the closed-form machinery (as opposed to bad input).
inline bool is_numerical(Errc code) {
  return code == Errc::DegenerateMoments || code == Errc::SingularSystem ||
         code == Errc::NegativeMse || code == Errc::NonpositiveMse;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace propest
