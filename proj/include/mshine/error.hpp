#pragma once

#include <stdexcept>
#include <string>

namespace mshine {

/// Malformed or inconsistent input data. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters or losses became non-finite. Maps to CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node type has no member other than the positive, so no negative can be
/// drawn. Callers skip the triple.
class NegativeSamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mshine
