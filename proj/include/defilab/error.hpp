#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace defilab {

/// Base of every domain error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// A product of two variables (or variable times constant on the right) in a term.
class NonlinearTermError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Quantifier elimination exceeded the configured cell or coefficient budget.
class ResourceLimitError : public Error {
public:
    ResourceLimitError(const std::string& what, std::string subformula);

    const std::string& subformula() const noexcept { return subformula_; }

private:
    std::string subformula_;
};

/// Blocks or neighborhoods reach outside the grid they are read from.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A caller-asserted hypothesis failed re-verification.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class InvalidCertificate : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

}  // namespace defilab
