#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace defilab {

using Int = boost::multiprecision::cpp_int;

// Floor division and modulus for b > 0.
Int floor_div(const Int& a, const Int& b);
Int ceil_div(const Int& a, const Int& b);
Int floor_mod(const Int& a, const Int& b);

Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);

std::int64_t floor_mod(std::int64_t a, std::int64_t b);

bool fits_int64(const Int& value);
std::int64_t to_int64(const Int& value);

std::string to_string(const Int& value);

}  // namespace defilab
