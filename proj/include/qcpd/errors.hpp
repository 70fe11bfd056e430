#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcpd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A Helstrom measurement was requested with no live hypotheses.
class DegenerateInputError : public Error {
  public:
    using Error::Error;
};

/// A Bayes update was fed an outcome that the current prior assigns
/// probability zero.
class ImpossibleOutcomeError : public Error {
  public:
    using Error::Error;
};

/// The request is too large to evaluate exactly.
class ResourceError : public Error {
  public:
    using Error::Error;
};

/// A stream-driven trial hit a time bin without an effective event.
class InvalidTrialError : public Error {
  public:
    explicit InvalidTrialError(int bin)
        : Error("time bin " + std::to_string(bin) +
                " contains no effective event"),
          bin_(bin) {}
    [[nodiscard]] int bin() const noexcept { return bin_; }

  private:
    int bin_;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : Error(line == 0 ? what
                          : "line " + std::to_string(line) + ": " + what),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace qcpd
