#pragma once

#include <stdexcept>
#include <string>

namespace mvkpca {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A combination the framework does not support, e.g. primal training on a
/// kernel without an explicit feature map.
class UnsupportedSetting : public Error {
 public:
  using Error::Error;
};

/// Requested component count exceeds the numerical rank of the data.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Gamma is not (numerically) symmetric positive definite.
class SingularGamma : public Error {
 public:
  using Error::Error;
};

/// The linear system of a missing-view inference is too badly conditioned.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// Pre-image requested for a view whose kernel has no known inverse map.
class WrongKernel : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV series, model JSON, configuration).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Generic invalid argument (empty inputs, out-of-range parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace mvkpca
