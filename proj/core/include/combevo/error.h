#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace combevo {

// Base of every error the library reports. Tools map subclasses to exit
// codes: configuration problems are distinct from I/O problems.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text could not be parsed (alphabet file, pattern file, flags).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Persisted state is truncated, checksum-mismatched, or from another
// format version.
class CorruptFileError : public Error {
 public:
  using Error::Error;
};

// A regular expression failed to compile. `position` is the byte offset
// into the pattern source where the problem was detected.
class PatternError : public Error {
 public:
  PatternError(const std::string& message, std::size_t position)
      : Error(message), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace combevo
