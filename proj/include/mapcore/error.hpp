#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mapcore {

/// Failure categories raised by the library. The CLI maps them onto exit
/// codes (validation errors -> 1, I/O errors -> 2).
enum class ErrorCode {
  kBounds,             // pixel outside the image
  kAboveHorizon,       // |pitch_eff| >= 90 deg
  kInvalidDepth,       // depth <= 0 or non-finite
  kDegenerateLatitude, // origin too close to a pole
  kNotVisible,         // target behind the camera or outside the frustum
  kFormat,             // malformed file contents
  kIo,                 // file could not be opened / written
  kNoDepth,            // no valid depth pixel under a detection
  kConfig,             // invalid configuration or inconsistent inputs
  kDimension,          // raster dimensions disagree
  kEmptyReport,        // nothing left to evaluate
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mapcore
