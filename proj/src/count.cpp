#include "cfc/count.hpp"

#include <cmath>
#include <limits>

namespace cfc {

double log2_of(const Count& c) {
  if (c <= 0) return -std::numeric_limits<double>::infinity();
  const unsigned bits = boost::multiprecision::msb(c);
  if (bits < 60) return std::log2(c.convert_to<double>());
  // Keep the top 60 bits so the conversion stays in range for huge counts.
  const Count top = c >> (bits - 59);
  return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 59);
}

}  // namespace cfc
