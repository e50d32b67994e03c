#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Argument outside the state or action domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Mismatched sizes (grids, measures, tables).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Weights that are negative or do not sum to one.
class InvalidMeasureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Model parameters violating a family invariant (sigma <= 0, beta outside (0,1), ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The one-dimensional action objective was found not to be unimodal.
class ConvexityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A contraction constant has a vanishing or negative denominator.
class DegenerateConstants : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A solve was requested for a model whose contraction conditions fail.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mfg
