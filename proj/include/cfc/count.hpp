#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace cfc {

/// Exact nonnegative count. Crossing-free structure counts grow
/// exponentially, so no fixed-width type will do.
using Count = boost::multiprecision::cpp_int;

inline std::string to_decimal(const Count& c) { return c.str(); }

/// log2 of a positive count, for human-readable reports; 0 maps to -inf.
double log2_of(const Count& c);

}  // namespace cfc
