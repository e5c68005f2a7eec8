#pragma once

#include <stdexcept>
#include <string>

namespace dwarfs {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file or OS interface failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Bytes on disk do not match the expected format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Allocation or other resource exhaustion.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A counter source (proc interface, perf events, fixture) cannot supply a
/// required group or event. `group()` names what is missing.
class CounterUnavailable : public Error {
 public:
  CounterUnavailable(std::string group, const std::string& what)
      : Error(what), group_(std::move(group)) {}
  const std::string& group() const noexcept { return group_; }

 private:
  std::string group_;
};

}  // namespace dwarfs
