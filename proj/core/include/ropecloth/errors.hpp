#pragma once

#include <stdexcept>
#include <string>

namespace ropecloth {

/// Bad scene/model/dataset configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A runtime invariant failed (non-finite state, negative tension, ...);
/// the CLI maps this to exit code 3.
class InvariantError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace ropecloth
