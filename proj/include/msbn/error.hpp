#pragma once

#include <stdexcept>
#include <string>

namespace msbn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quotient cell with positive numerator and zero denominator.
class InconsistentSupport : public Error {
 public:
  InconsistentSupport(std::size_t cell, const std::string& what) : Error(what), cell_(cell) {}
  std::size_t cell() const { return cell_; }

 private:
  std::size_t cell_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class OracleLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace msbn
