#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace maiv {

// Base for every error the library raises. The CLI maps the concrete type to
// an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// File contents that do not follow the declared on-disk format.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Generator backend failure. Carries the key-frame index being synthesized
// when the failure happened, if known.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what,
                        std::optional<std::size_t> frame_index = std::nullopt)
      : Error(what), frame_index_(frame_index) {}

  std::optional<std::size_t> frame_index() const { return frame_index_; }

 private:
  std::optional<std::size_t> frame_index_;
};

}  // namespace maiv
