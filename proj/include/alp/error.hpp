#pragma once

#include <stdexcept>
#include <string>

namespace alp {

// Root of every exception thrown by the library. Validation problems and
// access denials are returned as values, not thrown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public StoreError {
 public:
  explicit DuplicateIdError(const std::string& record_id)
      : StoreError("duplicate record_id: " + record_id), record_id_(record_id) {}

  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

class SequenceOverflowError : public Error {
 public:
  using Error::Error;
};

class LockHeldError : public StoreError {
 public:
  using StoreError::StoreError;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A referenced library, record or asset does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace alp
