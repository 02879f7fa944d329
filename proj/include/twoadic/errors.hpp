#pragma once

#include <stdexcept>
#include <string>

namespace twoadic {

// Base class for all mathematical failures (CLI exit code 1).
struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Division x/y with val2(y) > val2(x) in the fixed-point model.
struct PrecisionError : MathError {
    using MathError::MathError;
};

// Square root of an element that is not 1 mod 8.
struct NotASquare : MathError {
    using MathError::MathError;
};

struct NotInvertible : MathError {
    using MathError::MathError;
};

struct ContextMismatch : MathError {
    using MathError::MathError;
};

// No valuation-2 root of U/t (input not of the ordinary-curve shape).
struct HenselFailure : MathError {
    using MathError::MathError;
};

struct DegenerateInstance : MathError {
    using MathError::MathError;
};

// Odd-degree term survives in z/t mod 2 (upstream precision bug).
struct NotASquareChar2 : MathError {
    using MathError::MathError;
};

struct ReconstructionFailure : MathError {
    using MathError::MathError;
};

struct NoApproximant : MathError {
    using MathError::MathError;
};

struct NonZeroRemainder : MathError {
    using MathError::MathError;
};

struct IrreducibilityMismatch : MathError {
    using MathError::MathError;
};

struct HypothesisViolated : MathError {
    using MathError::MathError;
};

// Internal invariant broken (the precision analysis guarantees it cannot happen on valid
// inputs); a bug, not a recoverable condition.
struct IntegralityViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Malformed job file or bad CLI usage (exit code 2).
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace twoadic
