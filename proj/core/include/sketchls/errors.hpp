#ifndef SKETCHLS_ERRORS_HPP
#define SKETCHLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sketchls {

// Shape/argument mismatches between operands.
class dimension_error : public std::invalid_argument {
 public:
  explicit dimension_error(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative routine hit its cap; carries the best estimates seen.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double best_low, double best_high)
      : std::runtime_error(what), best_low(best_low), best_high(best_high) {}
  double best_low;
  double best_high;
};

// Backtracking drove the step below the underflow floor.
class line_search_error : public std::runtime_error {
 public:
  explicit line_search_error(const std::string& what) : std::runtime_error(what) {}
};

// Reference-solution computation failed to certify.
class oracle_error : public std::runtime_error {
 public:
  explicit oracle_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sketchls

#endif
