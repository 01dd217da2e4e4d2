#pragma once

#include <vector>

namespace carbonsched {

/// Error-free accumulator for doubles (Shewchuk's non-overlapping partials).
/// `value()` is the exact sum of everything added, rounded once to nearest.
/// The result does not depend on the order of additions.
class ExactSum {
 public:
  void add(double x);

  /// Adds the exact product a*b (not its rounded value).
  void add_product(double a, double b);

  double value() const;

 private:
  std::vector<double> partials_;
};

}  // namespace carbonsched
