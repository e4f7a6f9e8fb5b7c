#pragma once

#include <stdexcept>
#include <string>

namespace nonauto {

/// Base class for numerical and simulation failures.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The vector field evaluator produced NaN or Inf.
struct NonFiniteField : SimulationError {
    using SimulationError::SimulationError;
};

/// max_steps was reached before the end of the integration interval.
struct StepLimitExceeded : SimulationError {
    using SimulationError::SimulationError;
};

/// Query outside the time range covered by a trajectory.
struct OutOfRange : SimulationError {
    using SimulationError::SimulationError;
};

/// Every seed of a pullback ensemble escaped; no fiber estimate exists.
struct EmptyFiber : SimulationError {
    using SimulationError::SimulationError;
};

/// Both the forward and the reversed construction escaped; the scalar
/// equation has no bounded solutions on the window.
struct NoBoundedSolution : SimulationError {
    using SimulationError::SimulationError;
};

/// Bounded solutions exist but the dichotomy exponents are below the
/// hyperbolicity threshold.
struct NotHyperbolic : SimulationError {
    using SimulationError::SimulationError;
};

/// A frozen-parameter attractor needed by the averaged equation failed to
/// converge.
struct AveragingUnavailable : SimulationError {
    using SimulationError::SimulationError;
};

/// A stated hypothesis of a check failed along the computed solution.
struct PreconditionViolated : SimulationError {
    using SimulationError::SimulationError;
};

/// A sampled attractor fiber has diameter above tolerance, so no
/// single-valued section exists.
struct NotACopyOfBase : SimulationError {
    using SimulationError::SimulationError;
};

/// The attractor of the past-limit equation could not be constructed.
struct PastPairUnavailable : SimulationError {
    using SimulationError::SimulationError;
};

/// Undecided verdicts prevent a clean bisection bracket.
struct UndecidedBoundary : SimulationError {
    using SimulationError::SimulationError;
};

/// Invalid configuration document; `path` names the offending field.
struct ConfigError : std::runtime_error {
    ConfigError(std::string field_path, const std::string& message)
        : std::runtime_error(field_path + ": " + message), path(std::move(field_path)) {}
    std::string path;
};

}  // namespace nonauto
