#pragma once

#include <stdexcept>
#include <string>

namespace star {

// Malformed or unusable input data (files, matrices, model/graph mismatches).
// The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace star
