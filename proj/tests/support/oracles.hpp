#pragma once

// Test-only reference implementations, kept independent of the library code
// they check.

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace serin::testing {

// ~206 bits of mantissa; wide enough that double-term sums of 10^7 addends
// are exact for comparison purposes.
using hp_real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<62>>;

/// High-precision sum of a double-valued term function over [first, last].
template <typename Fn>
hp_real hp_sum(Fn&& term, std::uint64_t first, std::uint64_t last) {
  hp_real acc = 0;
  for (std::uint64_t i = first; i <= last; ++i) acc += hp_real(term(i));
  return acc;
}

/// High-precision sum of the terms evaluated in high precision as well
/// (independent of the double-precision term path).
template <typename Fn>
hp_real hp_sum_hp_terms(Fn&& term_hp, std::uint64_t first, std::uint64_t last) {
  hp_real acc = 0;
  for (std::uint64_t i = first; i <= last; ++i) acc += term_hp(i);
  return acc;
}

/// mu(n) by trial division.
inline int mobius_by_trial_division(std::uint64_t n) {
  if (n == 0) return 0;
  int factors = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    ++factors;
  }
  if (n > 1) ++factors;
  return factors % 2 == 0 ? 1 : -1;
}

}  // namespace serin::testing
