#pragma once

#include <stdexcept>
#include <string>

namespace gsim {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid values, violated preconditions, unusable configuration. CLI exit code 1.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// File system or network failures. CLI exit code 2.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Tile exists in no form at the requested address (e.g. HTTP 404, no file).
class MissingTile : public IoError {
public:
    explicit MissingTile(const std::string& msg) : IoError(msg) {}
};

// Tile bytes were retrieved but do not decode to a usable raster.
class CorruptTile : public IoError {
public:
    explicit CorruptTile(const std::string& msg) : IoError(msg) {}
};

// Endpoint unreachable after the configured retries.
class SourceUnavailable : public IoError {
public:
    explicit SourceUnavailable(const std::string& msg) : IoError(msg) {}
};

// Stitch input does not cover the requested bounding box.
class IncompleteCoverage : public DomainError {
public:
    explicit IncompleteCoverage(const std::string& msg) : DomainError(msg) {}
};

// Raster sample coordinates outside the valid interpolation domain.
class OutOfBounds : public DomainError {
public:
    explicit OutOfBounds(const std::string& msg) : DomainError(msg) {}
};

// Rank-deficient correspondence set (e.g. three collinear points).
class DegenerateCorrespondences : public DomainError {
public:
    explicit DegenerateCorrespondences(const std::string& msg) : DomainError(msg) {}
};

// Homography not invertible after normalization.
class DegenerateHomography : public DomainError {
public:
    explicit DegenerateHomography(const std::string& msg) : DomainError(msg) {}
};

// A registration method could not produce a usable estimate.
class RegistrationFailed : public Error {
public:
    explicit RegistrationFailed(const std::string& msg) : Error(msg) {}
};

}  // namespace gsim
