#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

/** Invalid configuration or argument values (maps to CLI exit code 2). */
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/** Numeric breakdown: overflow past the magnitude guard, non-finite result
 *  (maps to CLI exit code 3). */
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what, double magnitude = 0.0)
      : std::runtime_error(what), magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_;
};

/** A numeric trajectory blew up; carries the approximate pole location. */
class pole_error : public std::runtime_error {
 public:
  pole_error(const std::string& what, double where)
      : std::runtime_error(what), where_(where) {}
  double where() const { return where_; }

 private:
  double where_;
};

/** Raised when the square-root auxiliary polynomial has odd degree, so no
 *  polynomial Riccati solution can exist. */
class no_polynomial_solution : public std::runtime_error {
 public:
  explicit no_polynomial_solution(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcs
