#pragma once

#include <stdexcept>
#include <string>

namespace matkex {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class InversionOfZero : public Error {
public:
    InversionOfZero() : Error("inversion of zero") {}
};

class NonFiniteResult : public Error {
public:
    NonFiniteResult() : Error("non-finite result in complex arithmetic") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The augmented system has larger rank than the coefficient grid.
class Inconsistent : public Error {
public:
    Inconsistent() : Error("linear system is inconsistent") {}
    using Error::Error;
};

class NotInSpan : public Error {
public:
    NotInSpan() : Error("vector is not in the span") {}
    using Error::Error;
};

class ModulusTooSmall : public Error {
public:
    using Error::Error;
};

class NonMonicDivisor : public Error {
public:
    NonMonicDivisor() : Error("divisor polynomial is not monic of degree >= 1") {}
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace matkex
