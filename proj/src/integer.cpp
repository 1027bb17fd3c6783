#include "defilab/integer.hpp"

#include <limits>

#include "defilab/error.hpp"

namespace defilab {

Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int ceil_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

Int floor_mod(const Int& a, const Int& b) {
    Int r = a % b;
    if (r < 0) r += b;
    return r;
}

Int gcd(const Int& a, const Int& b) {
    return boost::multiprecision::gcd(a, b);
}

Int lcm(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return boost::multiprecision::abs(a / gcd(a, b) * b);
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    std::int64_t r = a % b;
    return r < 0 ? r + b : r;
}

bool fits_int64(const Int& value) {
    return value >= std::numeric_limits<std::int64_t>::min() &&
           value <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t to_int64(const Int& value) {
    if (!fits_int64(value)) throw Error("integer " + value.str() + " does not fit in 64 bits");
    return value.convert_to<std::int64_t>();
}

std::string to_string(const Int& value) {
    return value.str();
}

}  // namespace defilab
