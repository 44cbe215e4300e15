#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ghostguide {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoPropagatingModes : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidKernel : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EmptyTarget : public Error {
public:
    using Error::Error;
};

class InvalidModel : public Error {
public:
    using Error::Error;
};

class NoEquipartition : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent scenario configuration. `path` names the
/// offending field, e.g. "source.aperture".
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace ghostguide
