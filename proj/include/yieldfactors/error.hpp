#pragma once

#include <stdexcept>
#include <string>

namespace yf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file (header, cell, or date).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but nothing survived filtering.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented range (k, window, dimensions, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input violates a mathematical precondition (negative entry, non-positive
// matrix where positivity is required).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Zero variance, vanished factor count, zero factor value on a date, ...
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace yf
