#include "pauliprop/numeric.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace pauliprop {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("refusing to format a non-finite value");
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: buffer too small");
  return std::string(buf.data(), ptr);
}

void ExactSum::add(double v) {
  if (v == 0.0) return;
  if (!std::isfinite(v)) throw std::domain_error("ExactSum: non-finite value");
  int exp = 0;
  const double frac = std::frexp(v, &exp);
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  const int e = exp - 53 + kOffset;
  blocks_[e >> 5] += static_cast<__int128>(mantissa) << (e & 31);
}

namespace {

// Splits every block into [0, 2^32) and returns the carry out of the top.
__int128 normalize(const __int128* in, __int128* out, int n, bool negate) {
  __int128 carry = 0;
  for (int b = 0; b < n; ++b) {
    const __int128 t = (negate ? -in[b] : in[b]) + carry;
    carry = t >> 32;
    out[b] = t - (carry << 32);
  }
  return carry;
}

}  // namespace

double ExactSum::value() const {
  __int128 norm[kBlocks];
  const bool negative = normalize(blocks_, norm, kBlocks, false) < 0;
  // The magnitude is normalized so that no borrow reaches past the top block.
  if (negative) normalize(blocks_, norm, kBlocks, true);
  CompensatedSum acc;
  for (int b = kBlocks; b-- > 0;) {
    if (norm[b] != 0) acc.add(std::ldexp(static_cast<double>(norm[b]), 32 * b - kOffset));
  }
  return negative ? -acc.value() : acc.value();
}

}  // namespace pauliprop
