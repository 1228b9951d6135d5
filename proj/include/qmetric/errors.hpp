#pragma once

#include <stdexcept>
#include <string>

namespace qmetric {

// Inputs break a structural contract: dimension mismatch, failed
// pseudo-Hermiticity, defective spectrum, inconsistent generator family.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters fall outside the regime a construction is defined in
// (exceptional point, closed form requested with a complex spectrum).
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qmetric
