#pragma once

#include <stdexcept>
#include <string>

namespace alcc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Vector/matrix/cone dimension mismatch.
struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// NaN/Inf encountered where a finite value is required.
struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(what) {}
};

/// Invalid parameter value (nonpositive penalty, negative tolerance, ...).
struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

/// (set, regularizer) pair outside the supported prox table.
struct UnsupportedCombination : Error {
  explicit UnsupportedCombination(const std::string& what) : Error(what) {}
};

/// An iterative routine exhausted its hard iteration cap.
struct NonconvergenceError : Error {
  explicit NonconvergenceError(const std::string& what) : Error(what) {}
};

/// Problem-file / trace-file parsing or validation failure.
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace alcc
