#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace section_lab {

enum class ErrorCode {
  DegenerateInput,
  InvalidBody,
  EmptySample,
  ZeroVariance,
  NonPositiveBandwidth,
  ZeroGridPoint,
  InfiniteMean,
  ZeroLocation,
  AllZeroLikelihood,
  OutOfSupport,
  InputError,
};

std::string_view to_string(ErrorCode code);

/// Every module reports failures through this one exception type; the code
/// is what the CLI turns into its machine-readable error payload.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace section_lab
