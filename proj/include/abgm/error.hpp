#pragma once

#include <stdexcept>
#include <string>

namespace abgm {

// Base of every error thrown by the library. The CLI maps these to exit 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown policy, empty stem, bad rule-table file.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("configuration error: " + what) {}
};

// Value outside the domain of a lookup (hp > 400, level not in a ladder, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

// Malformed or unsupported file (WAV header, match log syntax).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error("format error: " + what) {}
};

// Frame streams that are empty, non-consecutive or misaligned.
class SequencingError : public Error {
public:
    explicit SequencingError(const std::string& what) : Error("sequencing error: " + what) {}
};

class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& what) : Error("calibration error: " + what) {}
};

} // namespace abgm
