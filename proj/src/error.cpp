#include "microprop/error.hpp"

namespace microprop {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::StepUnstable: return "StepUnstable";
    case Errc::ScheduleInvalid: return "ScheduleInvalid";
    case Errc::DegenerateImage: return "DegenerateImage";
    case Errc::FitUnderdetermined: return "FitUnderdetermined";
    case Errc::EmptyTraining: return "EmptyTraining";
    case Errc::ConstantTruth: return "ConstantTruth";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::MissingImage: return "MissingImage";
    case Errc::DuplicatePath: return "DuplicatePath";
    case Errc::RunNotFound: return "RunNotFound";
    case Errc::TestLargerThanData: return "TestLargerThanData";
    case Errc::EmptyManifest: return "EmptyManifest";
    case Errc::ModelFormat: return "ModelFormat";
    case Errc::Io: return "Io";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace microprop
