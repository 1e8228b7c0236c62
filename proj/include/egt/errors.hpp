#pragma once

#include <stdexcept>
#include <string>

namespace egt {

// Invalid configuration value; `field` names the offending key.
class config_error : public std::invalid_argument {
 public:
  config_error(std::string field, const std::string& message)
      : std::invalid_argument("field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Numerical failure: singular solve, non-convergent quadrature, defective
// spectral data. May carry a partial estimate when one exists.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& message)
      : std::runtime_error(message), partial_(0.0), has_partial_(false) {}
  numerical_error(const std::string& message, double partial)
      : std::runtime_error(message), partial_(partial), has_partial_(true) {}

  bool has_partial() const noexcept { return has_partial_; }
  double partial() const noexcept { return partial_; }

 private:
  double partial_;
  bool has_partial_;
};

// Failure of one realization inside an ensemble run.
class ensemble_error : public std::runtime_error {
 public:
  ensemble_error(long index, const std::string& message)
      : std::runtime_error("realization " + std::to_string(index) + ": " + message),
        index_(index) {}

  long index() const noexcept { return index_; }

 private:
  long index_;
};

}  // namespace egt
