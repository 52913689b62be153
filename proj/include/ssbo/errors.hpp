#pragma once

#include <stdexcept>
#include <string>

namespace ssbo {

// Shape of an argument disagrees with the model or domain it is used with.
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Paired containers (inputs/targets, traces of different lengths, ...).
struct LengthMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky factorization failed, or a quantity that must be PSD is not.
struct NonPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objects built over different domains were mixed.
struct DomainMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonPositiveStd : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RateOutOfRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Point lies outside an objective's defined box.
struct OutOfRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingManifest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ssbo
