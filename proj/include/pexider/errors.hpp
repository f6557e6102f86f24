#ifndef PEXIDER_ERRORS_HPP
#define PEXIDER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pexider {

/// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation request outside a function's (margin-shrunk) domain.
struct DomainError : Error {
    using Error::Error;
};

/// Target value outside the image of a monotone function / sumset.
struct RangeError : Error {
    using Error::Error;
};

/// Sampled derivative changes sign or vanishes where strict monotonicity is required.
struct MonotonicityError : Error {
    using Error::Error;
};

/// A named algebraic constraint between family constants fails.
struct ConstraintError : Error {
    explicit ConstraintError(const std::string& identity, const std::string& detail = "")
        : Error("constraint violated: " + identity + (detail.empty() ? "" : " (" + detail + ")")),
          identity_(identity) {}
    const std::string& identity() const { return identity_; }

  private:
    std::string identity_;
};

/// Caller-supplied pieces fail to meet the required value/derivative match at a junction.
struct ContinuityError : Error {
    using Error::Error;
};

/// Quadrature non-convergence, bracketing failure, coverage gap, and similar numeric trouble.
struct NumericError : Error {
    using Error::Error;
};

/// A reconstruction left the regime it was asked for (e.g. g' changes sign).
struct RegimeError : Error {
    using Error::Error;
};

/// Invalid case description passed to a constructor that builds canonical solutions.
struct SpecError : Error {
    using Error::Error;
};

/// Malformed config/artifact files (unknown keys, wrong types, missing fields).
struct SchemaError : Error {
    using Error::Error;
};

}  // namespace pexider

#endif
