#pragma once

#include <stdexcept>
#include <string>

namespace kapitza {

// Base class for every error thrown by this library. Advisory conditions
// (shallow well, region of validity left, unconverged eigenvalue) are
// reported as flags on result structs instead and never throw.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Potential has no interior barrier for the given parameters.
class NotDoubleWell : public Error {
public:
    using Error::Error;
};

// Energy lies outside the range where the requested quantity exists,
// e.g. turning points above the barrier top or below the well bottom.
class EnergyOutOfRange : public Error {
public:
    using Error::Error;
};

// A physical input that must be positive was not.
class NonPositiveInput : public Error {
public:
    using Error::Error;
};

// Weak-coupling reference series has a vanishing denominator at this index.
class WeakSeriesSingular : public Error {
public:
    using Error::Error;
};

// Closed-form coefficient table only covers orders l <= 2.
class OrderBeyondTable : public Error {
public:
    using Error::Error;
};

// Recursive coefficient generation hit an inconsistent solvability
// condition, so the gauge choice does not close.
class GaugeConflict : public Error {
public:
    using Error::Error;
};

// Canonical-coordinate map evaluated on the wrong branch or outside the
// strip where the inverse is defined.
class BranchViolation : public Error {
public:
    using Error::Error;
};

// Integration path passes through or too close to a singularity of the
// integrand.
class PathSingularity : public Error {
public:
    using Error::Error;
};

// Parameters violate a domain restriction of the formula, e.g. the
// two-level reduction with |A| >= 2B.
class ParameterDomain : public Error {
public:
    using Error::Error;
};

// Adaptive ODE integration failed to reach the requested endpoint within
// the step budget.
class IntegratorFailure : public Error {
public:
    using Error::Error;
};

// Node counting could not separate a sign change from noise even after
// grid refinement.
class AmbiguousNode : public Error {
public:
    using Error::Error;
};

} // namespace kapitza
