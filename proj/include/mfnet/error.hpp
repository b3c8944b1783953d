#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfnet {

// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input row. Carries the 1-based line number of the offending row.
class ParseError : public Error {
  public:
    ParseError(const std::string &source, std::size_t line, const std::string &what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

// A cross-reference (author, institution, class) that does not resolve.
class ReferenceError : public Error {
  public:
    using Error::Error;
};

// Argument outside the domain of a function (probability > 1, year < 1971, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

// Two objects that must share an index space do not.
class MismatchError : public Error {
  public:
    using Error::Error;
};

} // namespace mfnet
