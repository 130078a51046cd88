#include "actplace/random.hpp"

#include <cmath>
#include <numbers>

namespace actplace {

double PortableRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double PortableRng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace actplace
