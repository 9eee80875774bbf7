#pragma once

#include <stdexcept>
#include <string>

namespace hetsim {

// Base of every error the library raises. The CLI maps all of these to
// exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document or a field of the wrong type / missing field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Dangling edges, cycles, duplicate ids.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Values that parse but violate a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent routing / suite / plan combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Requested quantity is undefined for the given input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A synthetic-model spec whose ranges cannot be satisfied.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetsim
