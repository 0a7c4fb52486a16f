#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtbn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Structurally invalid model: duplicate names, dangling references, bad fields.
class ModelError : public Error {
public:
    using Error::Error;
};

class UnknownInstanceError : public Error {
public:
    using Error::Error;
};

class MissingRowError : public Error {
public:
    using Error::Error;
};

/// A structure with a directed cycle that is not certified to have probability zero.
class CyclicStructureError : public Error {
public:
    using Error::Error;
};

class ZeroEvidenceError : public Error {
public:
    using Error::Error;
};

/// A sampling run where no sample carried weight for the evidence.
class InconclusiveRunError : public Error {
public:
    using Error::Error;
};

class EnumerationCapError : public Error {
public:
    using Error::Error;
};

}  // namespace mtbn
