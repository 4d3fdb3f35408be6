#pragma once

#include <stdexcept>
#include <string>

namespace speccam {

// Base for all domain errors. I/O failures use IoError so callers can map
// them to a distinct exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SPECCAM_DEFINE_ERROR(NAME)                 \
  struct NAME : Error {                            \
    explicit NAME(const std::string& msg)          \
        : Error(std::string(#NAME ": ") + msg) {}  \
  }

SPECCAM_DEFINE_ERROR(EmptyInput);
SPECCAM_DEFINE_ERROR(GridMismatch);
SPECCAM_DEFINE_ERROR(BandNotFound);
SPECCAM_DEFINE_ERROR(DegenerateNormalizer);
SPECCAM_DEFINE_ERROR(SingularCalibration);
SPECCAM_DEFINE_ERROR(ChartMismatch);
SPECCAM_DEFINE_ERROR(LayoutTooFine);
SPECCAM_DEFINE_ERROR(ProfileNotFound);
SPECCAM_DEFINE_ERROR(ProfileCorrupt);
SPECCAM_DEFINE_ERROR(RoiOutOfBounds);
SPECCAM_DEFINE_ERROR(TrainingDiverged);
SPECCAM_DEFINE_ERROR(BadHyperparameter);
SPECCAM_DEFINE_ERROR(FeatureModeMismatch);
SPECCAM_DEFINE_ERROR(BadRange);
SPECCAM_DEFINE_ERROR(SubsetTooSmall);
SPECCAM_DEFINE_ERROR(UndefinedCorrelation);
SPECCAM_DEFINE_ERROR(DegenerateRoc);
SPECCAM_DEFINE_ERROR(UndefinedRegression);
SPECCAM_DEFINE_ERROR(IoError);

#undef SPECCAM_DEFINE_ERROR

}  // namespace speccam
