#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghznet {

// Root of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An agent touched a qubit it does not own, or acted during the wrong phase.
class LoccViolation : public Error {
 public:
  using Error::Error;
};

// An operation was conditioned on (or a message carried) a bit the acting
// agent has never learned.
class ConditioningViolation : public Error {
 public:
  using Error::Error;
};

// A qubit that was expected to factor out is still entangled.
class ResidualEntanglement : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public Error {
 public:
  ConnectivityError(const std::string& what, int first, int second)
      : Error(what), first_(first), second_(second) {}

  // Two agents with no path (or hyperpath) between them.
  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

 private:
  int first_;
  int second_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ghznet
