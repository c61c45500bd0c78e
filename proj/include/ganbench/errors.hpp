#pragma once

#include <stdexcept>
#include <string>

namespace ganbench {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GANBENCH_DEFINE_ERROR(Name)                                  \
    struct Name : Error {                                            \
        explicit Name(const std::string& msg) : Error(msg) {}        \
    }

// data_pipeline
GANBENCH_DEFINE_ERROR(EmptyDirectory);
GANBENCH_DEFINE_ERROR(CorruptFile);
GANBENCH_DEFINE_ERROR(DegenerateRange);
GANBENCH_DEFINE_ERROR(InvalidTarget);
GANBENCH_DEFINE_ERROR(TooFewSamples);
GANBENCH_DEFINE_ERROR(IOError);

// gan_models
GANBENCH_DEFINE_ERROR(UnsupportedShape);
GANBENCH_DEFINE_ERROR(ShapeMismatch);
GANBENCH_DEFINE_ERROR(EmptyInput);
GANBENCH_DEFINE_ERROR(NonPositiveClip);

// adversarial_losses
GANBENCH_DEFINE_ERROR(ModeMismatch);
GANBENCH_DEFINE_ERROR(SizeMismatch);

// training_engine
GANBENCH_DEFINE_ERROR(EmptyTrainSplit);
GANBENCH_DEFINE_ERROR(NonFiniteLoss);
GANBENCH_DEFINE_ERROR(VersionMismatch);
GANBENCH_DEFINE_ERROR(CorruptCheckpoint);
GANBENCH_DEFINE_ERROR(EmptyTestSplit);

// eval_metrics
GANBENCH_DEFINE_ERROR(DimMismatch);
GANBENCH_DEFINE_ERROR(WindowLargerThanImage);
GANBENCH_DEFINE_ERROR(TooFewImages);
GANBENCH_DEFINE_ERROR(DegenerateClassifier);

// stats_validation
GANBENCH_DEFINE_ERROR(TooFewGroups);
GANBENCH_DEFINE_ERROR(UnsupportedAlpha);

// bench_cli
GANBENCH_DEFINE_ERROR(ConfigError);
GANBENCH_DEFINE_ERROR(MissingRuns);

#undef GANBENCH_DEFINE_ERROR

}  // namespace ganbench
