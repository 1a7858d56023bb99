#pragma once

#include <stdexcept>
#include <string>

namespace uplink {

/// Capacity pair (C, dC) for which a compression noise variance diverges.
struct DegenerateCapacityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Denominator matrix of a log-det form is not positive definite.
struct SingularDenominatorError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Quadratic does not satisfy the sign pattern that guarantees one positive root.
struct NoPositiveRootError : std::domain_error {
    using std::domain_error::domain_error;
};

/// No point of a search grid satisfies the feasibility predicate.
struct InfeasibleRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A conditional covariance is too close to singular for a finite answer.
struct SingularCovarianceError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A cross-checked invariant (bound ordering, oracle equivalence) failed.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : message),
          line(line) {}
    int line;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace uplink
