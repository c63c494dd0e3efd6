#pragma once

#include <string>
#include <string_view>

namespace wolbachia {

/// Shortest decimal string that parses back to exactly `value`.
/// Infinities are written as "inf" / "-inf".
std::string format_number(double value);

/// Parses a decimal number, "inf", or a quotient "a/b" of two decimals
/// (so rates can be written as in the literature, e.g. "0.00085/7").
/// Throws ValidationError on malformed input.
double parse_number(std::string_view text);

}  // namespace wolbachia
