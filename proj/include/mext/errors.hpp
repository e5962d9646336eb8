#pragma once

#include <stdexcept>
#include <string>

namespace mext {

// Contract violations carry the name of the violated precondition or
// invariant; callers (CLI) map them to exit code 1, config errors to 2.
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidShape : ContractError       { using ContractError::ContractError; };
struct EpsilonTooLarge : ContractError    { using ContractError::ContractError; };
struct ResolutionTooCoarse : ContractError{ using ContractError::ContractError; };
struct EmptySolidPart : ContractError     { using ContractError::ContractError; };
struct OutsideTubular : ContractError     { using ContractError::ContractError; };
struct HitSingularSet : ContractError     { using ContractError::ContractError; };
struct NoConvergence : ContractError      { using ContractError::ContractError; };
struct NoAdmissibleTranslation : ContractError { using ContractError::ContractError; };
struct UndefinedInput : ContractError     { using ContractError::ContractError; };
struct IsolatedHole : ContractError       { using ContractError::ContractError; };
struct TargetNotCovered : ContractError   { using ContractError::ContractError; };
struct EpsilonMarginViolation : ContractError { using ContractError::ContractError; };
struct EmptyRegion : ContractError        { using ContractError::ContractError; };
struct GapTooLarge : ContractError        { using ContractError::ContractError; };
struct ConstraintViolation : ContractError{ using ContractError::ContractError; };

// Config file problems; CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mext
