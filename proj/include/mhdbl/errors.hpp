#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhdbl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// theta_alpha * f produced inf/nan: y_max is too large for the decay of f.
class NonFiniteWeightProduct : public Error {
public:
    using Error::Error;
};

/// A banded implicit system had a zero pivot.
class SingularSystem : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class NonFiniteTendency : public Error {
public:
    explicit NonFiniteTendency(double t)
        : Error("non-finite tendency at t = " + std::to_string(t)), time(t) {}
    double time;
};

class BlowupDetected : public Error {
public:
    BlowupDetected(double t, const std::string& what, bool non_finite_ = false)
        : Error("blow-up detected at t = " + std::to_string(t) + ": " + what), time(t), non_finite(non_finite_) {}
    double time;
    bool non_finite;  ///< false when only the amplitude cap was hit
};

class OverflowAtM : public Error {
public:
    explicit OverflowAtM(int m_)
        : Error("semi-norm overflow at m = " + std::to_string(m_)), m(m_) {}
    int m;
};

class UnstableSample : public Error {
public:
    explicit UnstableSample(double t)
        : Error("non-finite norms in monitor sample at t = " + std::to_string(t)), time(t) {}
    double time;
};

class RadiusCollapsed : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Configuration rejected at load; message names module, field and line.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace mhdbl
