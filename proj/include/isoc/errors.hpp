#pragma once

#include <stdexcept>
#include <string>

namespace isoc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mutually inconsistent matrix/vector dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// Cost assembly produced an unusable problem (e.g. R not positive definite).
struct InvalidCost : Error {
    using Error::Error;
};

// Invalid objective or solver configuration.
struct InvalidConfig : Error {
    using Error::Error;
};

// Non-finite values or unrecoverable singularity in a forward solve.
struct NumericalError : Error {
    using Error::Error;
};

// Moment estimation requested on a batch that is too small.
struct InsufficientSamples : Error {
    using Error::Error;
};

// Parameter-error normalizer refers to a zero entry.
struct InvalidNormalizer : Error {
    using Error::Error;
};

// File parsing / serialization failures.
struct IoError : Error {
    using Error::Error;
};

} // namespace isoc
