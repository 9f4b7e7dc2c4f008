#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace handwave {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid sensor configuration or out-of-range parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unknown full-scale range or calibration misuse.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// A frame could not be encoded (e.g. missing sensor value).
class EncodeError : public Error {
public:
    using Error::Error;
};

/// Stream header or container structure is invalid (bad magic, bad topology).
class WireFormatError : public Error {
public:
    using Error::Error;
};

/// A frame failed its checksum. Carries the index of the offending frame.
class CorruptFrameError : public Error {
public:
    CorruptFrameError(const std::string& msg, std::uint64_t frame_index)
        : Error(msg), frame_index(frame_index) {}
    std::uint64_t frame_index;
};

/// Surface construction or geodesic query failure.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Sensor-to-surface registration failure (snap distance exceeded).
class RegistrationError : public Error {
public:
    using Error::Error;
};

/// Signal-processing misuse (bad window, cutoff at or above Nyquist, ...).
class ProcessingError : public Error {
public:
    using Error::Error;
};

/// Similarity score is undefined (every channel had zero variance).
class UndefinedSimilarityError : public ProcessingError {
public:
    using ProcessingError::ProcessingError;
};

/// Wave-field reconstruction failure (orphan vertices, bad parameters).
class ReconstructionError : public Error {
public:
    using Error::Error;
};

/// Simulation misuse (source off the surface, duration too short, ...).
class SimulationError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or parsed.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace handwave
