#include "softnash/random.hpp"

#include <cmath>
#include <numbers>

namespace softnash {

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = rng_.uniform();
  const double u2 = rng_.uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  // The volatile copy keeps the compiler from fusing the pair into sincos,
  // which can round differently from separate sin and cos calls.
  const volatile double sin_arg = angle;
  spare_ = radius * std::sin(sin_arg);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace softnash
