#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stockcast {

// Base for every failure raised by the library. Subclasses name the category
// so callers (and the CLI) can map them to messages and exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

// Row-level parse failure; carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& detail, const std::string& file = {})
        : Error((file.empty() ? "line " : file + ":") + std::to_string(line) + ": " + detail),
          line_(line), detail_(detail) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

    ParseError with_file(const std::string& file) const { return ParseError(line_, detail_, file); }

private:
    std::size_t line_;
    std::string detail_;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace stockcast
