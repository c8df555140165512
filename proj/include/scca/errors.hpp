#pragma once

#include <stdexcept>
#include <string>

namespace scca {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linalg
struct InvalidMatrix : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };

// instance
struct ParseError : Error { using Error::Error; };
struct InvalidPopulation : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// solvers
struct NotACovariance : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };
struct CutGenerationFailed : Error { using Error::Error; };
struct InconsistentSubproblem : Error { using Error::Error; };

} // namespace scca
