#pragma once

#include <stdexcept>
#include <string>

namespace symdyn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed specs, unknown names, inadmissible words, bad arguments.
class InvalidInput : public Error {
public:
    using Error::Error;
};

class UnknownState : public InvalidInput {
public:
    explicit UnknownState(const std::string& label)
        : InvalidInput("unknown state '" + label + "'") {}
};

class StructuralViolation : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

}  // namespace symdyn
