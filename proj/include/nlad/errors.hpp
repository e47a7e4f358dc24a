#pragma once

#include <stdexcept>
#include <string>

namespace nlad {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: parameters, grids, config values.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// A precondition of the called operation does not hold (e.g. energy of a non-symmetric model).
class ContractError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ResourceCapError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw ValidationError(msg);
}

} // namespace nlad
