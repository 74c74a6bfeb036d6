#pragma once

#include <stdexcept>
#include <string>

namespace tpfr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments have incompatible shapes: group mismatch, wrong tuple size,
/// overlapping coordinate sets, malformed function tables and so on.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an event of probability zero.
class NullEventError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap was exceeded. `cap()` names the cap so that
/// callers (the CLI in particular) can report it.
class CapExceeded : public Error {
 public:
  CapExceeded(std::string cap, const std::string& what)
      : Error(what), cap_(std::move(cap)) {}
  const std::string& cap() const noexcept { return cap_; }

 private:
  std::string cap_;
};

}  // namespace tpfr
