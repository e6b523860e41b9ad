#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dopt {

enum class ErrorCode {
  InvalidArgument,
  NonFinite,
  NotPositiveDefinite,
  NoConvergence,
  InvalidDesign,
  RankDeficient,
  InvalidWeights,
  SingularInformation,
  SingularStart,
  NegativeWeight,
  NoIntercept,
  NotInteriorOptimum,
  ComplexSpectrum,
  BadParameter,
  ParseError,
  ShapeError,
  IoError,
};

/// Stable machine-readable name, e.g. "NotPositiveDefinite".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dopt
