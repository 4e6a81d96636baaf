#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pairloc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class InvalidDomain : public Error {
 public:
  using Error::Error;
};

// Rejection sampling exhausted its attempt budget.
class SamplingFailure : public Error {
 public:
  SamplingFailure(const std::string& what, std::uint64_t attempts)
      : Error(what), attempts_(attempts) {}
  std::uint64_t attempts() const noexcept { return attempts_; }

 private:
  std::uint64_t attempts_;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairloc
