#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace extcone {

// Exact rational scalar used throughout the polynomial layer. Arbitrary
// precision integers so the annihilation identities hold exactly.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

inline std::string num_str(const Rat& q) { return numerator(q).str(); }
inline std::string den_str(const Rat& q) { return denominator(q).str(); }

} // namespace extcone
