#pragma once

#include <stdexcept>
#include <string>

namespace smallball {

// Base class for every error this library throws on its own behalf.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid process/kernel parameters (alpha = -1, beta <= 0, bad knobs).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Grid or node count too coarse for the requested computation.
class ResolutionError : public Error {
public:
    using Error::Error;
};

// Kernel failed a structural check (not PSD beyond tolerance).
class KernelError : public Error {
public:
    using Error::Error;
};

// Value outside the representable range despite internal rescaling.
class RangeError : public Error {
public:
    using Error::Error;
};

// Evaluation requested inside a removable-singularity radius with no
// limit path available.
class SingularityError : public Error {
public:
    using Error::Error;
};

// A root bracket did not isolate exactly one sign change after widening.
class RootIsolationError : public Error {
public:
    using Error::Error;
};

// An infinite product or running ratio failed to stabilize.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Operation is undefined for the given process (e.g. Theorem-type
// verification when the operator has a zero-order term).
class NotApplicableError : public Error {
public:
    using Error::Error;
};

// Quadrature did not converge to the requested accuracy.
class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, double achieved)
        : Error(what), achieved_bound(achieved) {}
    double achieved_bound;
};

} // namespace smallball
