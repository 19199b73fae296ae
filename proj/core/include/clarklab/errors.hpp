#pragma once

#include <stdexcept>
#include <string>

namespace clarklab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad input, wrong flags, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Point outside the domain of a function (|z| > 1, singular atom, ...).
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Malformed function/matrix specification; `pointer` is a JSON pointer.
class SpecError : public PreconditionError {
 public:
  SpecError(std::string pointer, const std::string& what)
      : PreconditionError((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// A numerical procedure could not reach a conclusive answer.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed; indicates a bug or a broken invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace clarklab
