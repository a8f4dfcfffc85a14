#pragma once

#include <stdexcept>
#include <string>

namespace affect {

// Base class for all library errors. Subclasses distinguish what went wrong
// so the CLI can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand shapes do not conform (message names both shapes).
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// An index (label, tensor element, token position) is out of range.
class IndexError : public Error {
 public:
  explicit IndexError(const std::string& msg) : Error(msg) {}
};

// An operation that requires at least one element got none.
class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration: bad hyperparameter, unknown key, missing file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed input file; message carries a line number where applicable.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Operation invoked in the wrong order (e.g. backward without forward).
class StateError : public Error {
 public:
  explicit StateError(const std::string& msg) : Error(msg) {}
};

// Valid input asking for something the module does not do
// (e.g. upsampling, compressed WAV encodings, unknown checkpoint versions).
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

// Filesystem-level failure: missing path, short read, unwritable output.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace affect
