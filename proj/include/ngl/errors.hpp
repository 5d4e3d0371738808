#pragma once

#include <stdexcept>
#include <string>

namespace ngl {

/// Invalid arguments: out-of-range indices, length mismatches, bad options.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or solve failed on a matrix that should have been PD.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or degenerate input data (CSV parse failures, zero variance).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Ground-truth model cannot be sampled (e.g. infeasible weights).
class ModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace ngl
