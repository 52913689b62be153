#include "ssbo/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ssbo {

double Rng::normal() {
  // u1 in (0, 1] so the log is finite; u2 in [0, 1).
  const double u1 =
      (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
  const int k = static_cast<int>(uniform01() * n);
  return k < n ? k : n - 1;
}

}  // namespace ssbo
