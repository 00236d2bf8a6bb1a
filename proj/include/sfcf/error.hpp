#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfcf {

enum class Errc {
  kZeroVariance,
  kSingularMatrix,
  kInsufficientSamples,
  kDegenerateTable,
  kMixedTypes,
  kDuplicateFeature,
  kGraphMismatch,
  kMissingColumn,
  kNonBinaryLabel,
  kEmptyAfterCleaning,
  kTooManyFeatures,
  kNonFiniteLoss,
  kInvalidArgument,
  kIo,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kZeroVariance: return "ZeroVariance";
    case Errc::kSingularMatrix: return "SingularMatrix";
    case Errc::kInsufficientSamples: return "InsufficientSamples";
    case Errc::kDegenerateTable: return "DegenerateTable";
    case Errc::kMixedTypes: return "MixedTypes";
    case Errc::kDuplicateFeature: return "DuplicateFeature";
    case Errc::kGraphMismatch: return "GraphMismatch";
    case Errc::kMissingColumn: return "MissingColumn";
    case Errc::kNonBinaryLabel: return "NonBinaryLabel";
    case Errc::kEmptyAfterCleaning: return "EmptyAfterCleaning";
    case Errc::kTooManyFeatures: return "TooManyFeatures";
    case Errc::kNonFiniteLoss: return "NonFiniteLoss";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sfcf
