#pragma once

#include <stdexcept>
#include <string>

namespace simrec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSquareError : Error {
    using Error::Error;
};
struct NotSymmetricError : Error {
    using Error::Error;
};
struct NonFiniteError : Error {
    using Error::Error;
};
struct RankDeficientError : Error {
    using Error::Error;
};
struct ZeroSignalError : Error {
    using Error::Error;
};
struct ShapeMismatchError : Error {
    using Error::Error;
};
struct DegenerateOperatorError : Error {
    using Error::Error;
};
struct SubspaceNotOrthogonalError : Error {
    using Error::Error;
};
struct SpecInvalidError : Error {
    using Error::Error;
};
struct BudgetExceededError : Error {
    using Error::Error;
};
struct NoFitError : Error {
    using Error::Error;
};
struct InfeasibleDataError : Error {
    using Error::Error;
};
struct InsufficientCoverageError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace simrec
