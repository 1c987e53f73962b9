#pragma once

#include <stdexcept>
#include <string>

namespace veracity {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class TranslationError : public Error {
public:
    using Error::Error;
};

class StatsError : public Error {
public:
    using Error::Error;
};

} // namespace veracity
