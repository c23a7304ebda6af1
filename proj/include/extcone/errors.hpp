#pragma once

#include <stdexcept>
#include <string>

namespace extcone {

// Base class for all numerical/contract failures raised by the library.
// The CLI maps ConfigError to exit code 2 and everything else to 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct RecurrenceBlocked : Error {
    using Error::Error;
};
struct NotEvenDimension : Error {
    using Error::Error;
};
struct NoSolution : Error {
    using Error::Error;
};
struct StepFailure : Error {
    using Error::Error;
};
struct QuadratureFailure : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};
struct CFLViolation : Error {
    using Error::Error;
};
struct BlowupDetected : Error {
    using Error::Error;
};
struct ConvergenceRadius : Error {
    using Error::Error;
};
struct NonConvergent : Error {
    using Error::Error;
};
struct EdgeLeak : Error {
    using Error::Error;
};
struct SymmetryViolated : Error {
    using Error::Error;
};
struct LeastSquaresIllPosed : Error {
    using Error::Error;
};
struct ContractionFailure : Error {
    using Error::Error;
};
struct TailDivergence : Error {
    using Error::Error;
};
struct NoContraction : Error {
    using Error::Error;
};

} // namespace extcone
