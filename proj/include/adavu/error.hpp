#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adavu {

// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument, violated precondition or malformed input data.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown (non-finite likelihood, singular covariance, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

// File system or stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed record in a text file. what() reads "file:line: message".
class ParseError : public DomainError {
 public:
  ParseError(std::string file, std::size_t line, const std::string& message)
      : DomainError(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace adavu
