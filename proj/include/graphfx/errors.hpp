#pragma once

#include <stdexcept>
#include <string>

namespace graphfx {

// Base for every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or schema-violating graph/token/audio documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An operation that requires a valid graph received an invalid one.
class InvalidGraphError : public Error {
 public:
  using Error::Error;
};

// Numerical failure inside a processor (NaN/Inf in or out).
class NumericError : public Error {
 public:
  NumericError(int node_id, const std::string& what)
      : Error(what), node_id_(node_id) {}
  int node_id() const noexcept { return node_id_; }

 private:
  int node_id_;
};

// Adaptive randomization could not find audible inputs.
class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphfx
