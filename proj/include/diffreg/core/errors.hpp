#pragma once

#include <stdexcept>
#include <string>

namespace diffreg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyCloud : Error { using Error::Error; };
struct EmptyLevel : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };
struct TooSparse : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct StabilityViolation : Error { using Error::Error; };
struct NumericalUnderflow : Error { using Error::Error; };
struct EmptyPatch : Error { using Error::Error; };
struct NoCorrespondence : Error { using Error::Error; };
struct InsufficientPairs : Error { using Error::Error; };
struct AllCandidatesDegenerate : Error { using Error::Error; };
struct Divergence : Error { using Error::Error; };
struct NoPositivePairs : Error { using Error::Error; };
struct ZeroProbability : Error { using Error::Error; };
struct MalformedFile : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// Wraps a stage failure inside the end-to-end pipeline with its stage tag.
struct PipelineError : Error {
  PipelineError(std::string stage_name, const std::string& what)
      : Error("stage=" + stage_name + ": " + what),
        stage(std::move(stage_name)) {}
  std::string stage;
};

}  // namespace diffreg
