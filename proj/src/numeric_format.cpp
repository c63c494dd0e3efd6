#include "wolbachia/numeric_format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <fmt/format.h>

#include "wolbachia/errors.hpp"

namespace wolbachia {

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";  // also folds -0
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

namespace {

double parse_decimal(std::string_view text, std::string_view whole) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "inf" || text == "+inf" || text == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      std::isnan(value)) {
    throw ValidationError(fmt::format("'{}' is not a number", whole));
  }
  return value;
}

}  // namespace

double parse_number(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text, text);
  const double num = parse_decimal(text.substr(0, slash), text);
  const double den = parse_decimal(text.substr(slash + 1), text);
  if (den == 0.0) {
    throw ValidationError(fmt::format("'{}' divides by zero", text));
  }
  return num / den;
}

}  // namespace wolbachia
