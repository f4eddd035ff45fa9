#pragma once

#include <stdexcept>
#include <string>

namespace nlbe {

/// Argument outside the mathematical domain of a function (x <= 0, bad family parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requested on an object that cannot support it (e.g. sampling a
/// non-samplable daughter distribution).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlbe
