#pragma once

#include <stdexcept>
#include <string>

namespace tsk {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (mismatched n-gram orders,
// out-of-range indices, bad labels, ...).
class ContractError : public Error {
  public:
    using Error::Error;
};

// Malformed or missing input data: corpus files, cache files, splits.
class DataError : public Error {
  public:
    using Error::Error;
};

// Linear algebra failed (not positive definite, residual contract missed).
class NumericalError : public Error {
  public:
    using Error::Error;
};

}  // namespace tsk
