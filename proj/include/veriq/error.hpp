#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace veriq {

// Base of every error the library raises. Each subclass names the violated
// contract so callers (and the CLI) can map it to a diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidKeyError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyPopulationError : public Error {
 public:
  using Error::Error;
};

class EmptyAggregateError : public Error {
 public:
  using Error::Error;
};

class TamperError : public Error {
 public:
  TamperError(std::uint64_t id, const std::string& what)
      : Error(what), id_(id) {}
  std::uint64_t id() const { return id_; }

 private:
  std::uint64_t id_;
};

class WithheldTupleError : public Error {
 public:
  explicit WithheldTupleError(std::uint64_t id)
      : Error("server withheld requested tuple id " + std::to_string(id)),
        id_(id) {}
  std::uint64_t id() const { return id_; }

 private:
  std::uint64_t id_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Raised for invalid game or experiment configuration. The CLI maps this to
// exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnsupportedStrategyError : public Error {
 public:
  using Error::Error;
};

class NoMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidInfluenceError : public Error {
 public:
  using Error::Error;
};

class UnboundedSampleSizeError : public Error {
 public:
  using Error::Error;
};

class UndeterrableError : public Error {
 public:
  using Error::Error;
};

}  // namespace veriq
