#pragma once

#include <stdexcept>
#include <string>

namespace trime {

// Failure kinds surfaced by the library. The numeric values are mirrored by
// trime_status in trime.h, so only append.
enum class ErrorCode : int {
  InvalidArgument = 1,
  EmptyContour = 2,
  InvalidContour = 3,
  DegenerateDomain = 4,
  ZeroDensityCell = 5,
  NotBoundaryCell = 6,
  ProjectionStarvation = 7,
  EmptyMedialAxis = 8,
  DegenerateLfs = 9,
  DegenerateTriangle = 10,
  EmptyList = 11,
  EmptyTriangulation = 12,
  DegenerateCell = 13,
  NoConvergence = 14,
  NewtonDiverged = 15,
  ParseError = 16,
  ValidationError = 17,
  IoError = 18,
  InvalidState = 19,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trime
