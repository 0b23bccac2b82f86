#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace l2betti {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Render as "p/q", or "p" when the denominator is 1.
std::string fraction_string(const Rational& q);

/// Parse "p/q" or "p". Throws std::invalid_argument on malformed input.
Rational parse_fraction(const std::string& text);

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

} // namespace l2betti
