#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace microprop {

enum class Errc {
  InvalidArgument,
  StepUnstable,
  ScheduleInvalid,
  DegenerateImage,
  FitUnderdetermined,
  EmptyTraining,
  ConstantTruth,
  MissingLabel,
  MissingImage,
  DuplicatePath,
  RunNotFound,
  TestLargerThanData,
  EmptyManifest,
  ModelFormat,
  Io,
  Config,
};

std::string_view to_string(Errc code);

/// Exception carrying a machine-checkable error code. All recoverable
/// failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  Errc code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace microprop
