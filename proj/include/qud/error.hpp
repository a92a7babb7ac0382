#pragma once

#include <stdexcept>
#include <string>

namespace qud {

/// Base of every error the toolkit raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (index out of range, bad config).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: files, bracketed trees, label strings.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (unknown variant, out-of-range sampling parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qud
