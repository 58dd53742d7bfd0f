#pragma once

#include <stdexcept>

namespace schlesinger {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad input data or a domain violation; maps to CLI exit code 2.
struct ValidationError : Error {
  using Error::Error;
};

/// Numerical breakdown (singular chart, failed integration); CLI exit code 3.
struct NumericError : Error {
  using Error::Error;
};

struct RootMismatch : ValidationError { using ValidationError::ValidationError; };
struct OffQuadric : ValidationError { using ValidationError::ValidationError; };
struct MissingDirection : ValidationError { using ValidationError::ValidationError; };
struct ConeViolation : ValidationError { using ValidationError::ValidationError; };
struct ChartConditionViolated : ValidationError { using ValidationError::ValidationError; };
struct NoChartFound : ValidationError { using ValidationError::ValidationError; };
struct RestrictionViolated : ValidationError { using ValidationError::ValidationError; };
struct DegenerateReference : ValidationError { using ValidationError::ValidationError; };
struct ParseError : ValidationError { using ValidationError::ValidationError; };

struct ChartSingular : NumericError { using NumericError::NumericError; };
struct FormSingular : NumericError { using NumericError::NumericError; };
struct DegenerateDirection : NumericError { using NumericError::NumericError; };
struct PoleCollision : NumericError { using NumericError::NumericError; };
struct DriftAlarm : NumericError { using NumericError::NumericError; };
struct StepUnderflow : NumericError { using NumericError::NumericError; };

}  // namespace schlesinger
