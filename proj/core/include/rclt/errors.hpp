#ifndef RCLT_ERRORS_HPP
#define RCLT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rclt {

// Base classes chosen so the CLI can map failures onto exit codes:
// UsageError -> 1, ModelError (numeric/model) -> 2, IoError -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// what() always starts with the error name so harness rows can carry a
// classifiable failure string.
#define RCLT_DEFINE_MODEL_ERROR(Name)                                           \
    struct Name : ModelError {                                                  \
        Name() : ModelError(#Name) {}                                           \
        explicit Name(const std::string& what) : ModelError(#Name ": " + what) {} \
    }

#define RCLT_DEFINE_USAGE_ERROR(Name)                                           \
    struct Name : UsageError {                                                  \
        Name() : UsageError(#Name) {}                                           \
        explicit Name(const std::string& what) : UsageError(#Name ": " + what) {} \
    }

RCLT_DEFINE_MODEL_ERROR(NotPositiveSemiDefinite);
RCLT_DEFINE_MODEL_ERROR(NotPositiveDefinite);
RCLT_DEFINE_MODEL_ERROR(NonpositiveVariance);
RCLT_DEFINE_MODEL_ERROR(OddLengthUnsupported);
RCLT_DEFINE_MODEL_ERROR(MissingCovariance);
RCLT_DEFINE_MODEL_ERROR(DegenerateDesign);

RCLT_DEFINE_USAGE_ERROR(BadIndexSet);
RCLT_DEFINE_USAGE_ERROR(BadCoefficients);
RCLT_DEFINE_USAGE_ERROR(BadParameter);
RCLT_DEFINE_USAGE_ERROR(ShapeMismatch);
RCLT_DEFINE_USAGE_ERROR(DimMismatch);
RCLT_DEFINE_USAGE_ERROR(DimTooLarge);
RCLT_DEFINE_USAGE_ERROR(TwoSidedDimTooLarge);
RCLT_DEFINE_USAGE_ERROR(TooLarge);
RCLT_DEFINE_USAGE_ERROR(BadNesting);
RCLT_DEFINE_USAGE_ERROR(BadQ);
RCLT_DEFINE_USAGE_ERROR(BadM);
RCLT_DEFINE_USAGE_ERROR(EmptyObservations);

#undef RCLT_DEFINE_MODEL_ERROR
#undef RCLT_DEFINE_USAGE_ERROR

}  // namespace rclt

#endif
