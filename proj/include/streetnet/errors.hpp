#pragma once

#include <stdexcept>
#include <string>

namespace streetnet {

// Base of every error raised by the library. The CLI maps any of these to a
// nonzero exit code with the message on stderr.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid tuning parameter (radius 0, negative epsilon, bad patch spec, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents or I/O failure.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation precondition (non-binary skeleton, mismatched
// classification, broken graph invariant).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class EmptyGraph : public Error {
 public:
  EmptyGraph() : Error("graph has no qualifying vertices") {}
  using Error::Error;
};

class NoValidPairs : public Error {
 public:
  using Error::Error;
};

class LatitudeOutOfRange : public Error {
 public:
  using Error::Error;
};

class MissingCoverage : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

}  // namespace streetnet
