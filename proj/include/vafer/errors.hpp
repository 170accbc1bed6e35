#pragma once

#include <stdexcept>
#include <string>

namespace vafer {

// Bad input or configuration. The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation could not produce a meaningful result. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TargetOutOfBand : public ConfigError { using ConfigError::ConfigError; };
class CutoffOutOfRange : public ConfigError { using ConfigError::ConfigError; };
class LengthMismatch : public ConfigError { using ConfigError::ConfigError; };
class ShapeMismatch : public ConfigError { using ConfigError::ConfigError; };
class WindowTooLong : public ConfigError { using ConfigError::ConfigError; };
class UnsupportedHop : public ConfigError { using ConfigError::ConfigError; };

class NoisePowerUndefined : public NumericalError { using NumericalError::NumericalError; };
class DegenerateInput : public NumericalError { using NumericalError::NumericalError; };
class ZeroSpectrum : public NumericalError { using NumericalError::NumericalError; };
class AllModesZero : public NumericalError { using NumericalError::NumericalError; };
class ZeroSignal : public NumericalError { using NumericalError::NumericalError; };

}  // namespace vafer
