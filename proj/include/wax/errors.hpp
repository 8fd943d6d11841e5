#pragma once

#include <stdexcept>
#include <string>

namespace wax {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension bookkeeping.
struct DivisibilityError : Error { using Error::Error; };
struct RegimeError : Error { using Error::Error; };
struct DimError : Error { using Error::Error; };
struct DegenerateError : Error { using Error::Error; };

// Combining-module construction.
struct StructureDomainError : Error { using Error::Error; };
struct AlphaError : Error { using Error::Error; };
struct SingularThetaError : Error { using Error::Error; };

// Solving and validation.
struct RankError : Error { using Error::Error; };
struct InfeasibleError : Error { using Error::Error; };
struct SingularityError : Error { using Error::Error; };

// File and config handling.
struct IoError : Error { using Error::Error; };

}  // namespace wax
