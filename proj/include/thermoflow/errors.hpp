#pragma once

#include <stdexcept>
#include <string>

namespace thermoflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// R(f)(x) vanishes, so E_f cannot be rescaled onto the level set.
class ReebDerivativeZero : public Error {
public:
    using Error::Error;
};

class SingularBasis : public Error {
public:
    using Error::Error;
};

/// The velocity Hessian of a Lagrangian is not invertible.
class SingularHessian : public Error {
public:
    using Error::Error;
};

class NewtonDivergence : public Error {
public:
    NewtonDivergence(const std::string& what, int iterations, double residual)
        : Error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class StepSizeUnderflow : public Error {
public:
    StepSizeUnderflow(const std::string& what, double time)
        : Error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace thermoflow
