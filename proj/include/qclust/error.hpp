#pragma once

#include <stdexcept>
#include <string>

namespace qclust {

// Unreadable or unwritable files. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input contents (ragged CSV, bad magic, size mismatch).
// Also exit code 2. Everything else derived from std::exception is a
// computation error and maps to exit code 1.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qclust
