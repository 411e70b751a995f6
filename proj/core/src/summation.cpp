#include "serin/summation.hpp"

#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace serin {

namespace {

constexpr std::uint64_t kSignMask = 0x8000'0000'0000'0000ull;
constexpr std::uint64_t kFracMask = 0x000F'FFFF'FFFF'FFFFull;
constexpr std::uint64_t kImplicitBit = 1ull << 52;

}  // namespace

void ExactAccumulator::add_magnitude(std::uint64_t mantissa, int bit_pos) {
  const int w = bit_pos >> 6;
  const int b = bit_pos & 63;
  const std::uint64_t lo = mantissa << b;
  const std::uint64_t hi = b ? (mantissa >> (64 - b)) : 0;

  std::uint64_t old = words_[w];
  words_[w] += lo;
  std::uint64_t carry = (words_[w] < old) ? 1u : 0u;
  int i = w + 1;
  std::uint64_t piece = hi + carry;
  // hi <= 2^63-1 and carry <= 1, so piece cannot itself wrap.
  while (piece != 0 && i < kWords) {
    old = words_[i];
    words_[i] += piece;
    piece = (words_[i] < old) ? 1u : 0u;
    ++i;
  }
}

void ExactAccumulator::sub_magnitude(std::uint64_t mantissa, int bit_pos) {
  const int w = bit_pos >> 6;
  const int b = bit_pos & 63;
  const std::uint64_t lo = mantissa << b;
  const std::uint64_t hi = b ? (mantissa >> (64 - b)) : 0;

  std::uint64_t old = words_[w];
  words_[w] -= lo;
  std::uint64_t borrow = (words_[w] > old) ? 1u : 0u;
  int i = w + 1;
  std::uint64_t piece = hi + borrow;
  while (piece != 0 && i < kWords) {
    old = words_[i];
    words_[i] -= piece;
    piece = (words_[i] > old) ? 1u : 0u;
    ++i;
  }
}

void ExactAccumulator::add(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("ExactAccumulator: non-finite addend");
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t frac = bits & kFracMask;
  const int biased = static_cast<int>((bits >> 52) & 0x7FF);
  if (frac == 0 && biased == 0) return;  // +-0

  // value = mantissa * 2^(E-1075) with E = max(biased,1); bit_pos of the
  // mantissa LSB in the fixed-point register is E-1.
  const std::uint64_t mantissa = frac | (biased ? kImplicitBit : 0u);
  const int bit_pos = (biased ? biased : 1) - 1;

  if (bits & kSignMask)
    sub_magnitude(mantissa, bit_pos);
  else
    add_magnitude(mantissa, bit_pos);
}

void ExactAccumulator::merge(const ExactAccumulator& other) {
  std::uint64_t carry = 0;
  for (int i = 0; i < kWords; ++i) {
    const std::uint64_t a = words_[i];
    const std::uint64_t b = other.words_[i];
    const std::uint64_t s = a + b;
    const std::uint64_t t = s + carry;
    carry = ((s < a) || (t < s)) ? 1u : 0u;
    words_[i] = t;
  }
}

double ExactAccumulator::round() const {
  // Sign from the two's-complement top bit; work on the magnitude.
  const bool negative = (words_[kWords - 1] >> 63) != 0;
  std::array<std::uint64_t, kWords> mag = words_;
  if (negative) {
    std::uint64_t carry = 1;
    for (int i = 0; i < kWords; ++i) {
      mag[i] = ~mag[i] + carry;
      carry = (carry && mag[i] == 0) ? 1u : 0u;
    }
  }

  int top = kWords - 1;
  while (top >= 0 && mag[top] == 0) --top;
  if (top < 0) return 0.0;

  const int lead = 63 - std::countl_zero(mag[top]);
  const int P = top * 64 + lead;  // highest set bit; weight 2^(P-1074)

  if (P <= 52) {
    // Fits in a significand without rounding (covers all subnormal results).
    const double v = std::ldexp(static_cast<double>(mag[0]), -1074);
    return negative ? -v : v;
  }

  // Collect the 53 significand bits [P-52, P], then round on the rest.
  const auto bit_range = [&](int hi_bit, int lo_bit) -> std::uint64_t {
    // hi_bit-lo_bit <= 63; reads across at most two words
    const int w = lo_bit >> 6, b = lo_bit & 63;
    std::uint64_t v = mag[w] >> b;
    if (b != 0 && w + 1 < kWords) v |= mag[w + 1] << (64 - b);
    const int width = hi_bit - lo_bit + 1;
    return width < 64 ? (v & ((1ull << width) - 1)) : v;
  };

  std::uint64_t mant = bit_range(P, P - 52);
  const bool round_bit = bit_range(P - 53, P - 53) != 0;
  bool sticky = false;
  const int sticky_top = P - 54;
  if (sticky_top >= 0) {
    const int full_words = (sticky_top + 1) >> 6;
    for (int i = 0; i < full_words && !sticky; ++i) sticky = mag[i] != 0;
    const int rem_bits = (sticky_top + 1) & 63;
    if (!sticky && rem_bits > 0)
      sticky = (mag[full_words] & ((1ull << rem_bits) - 1)) != 0;
  }

  int exp_bits = P - 51;  // biased exponent of the result
  if (round_bit && (sticky || (mant & 1))) {
    ++mant;
    if (mant == (1ull << 53)) {
      mant >>= 1;
      ++exp_bits;
    }
  }
  if (exp_bits >= 2047) {
    const double inf = std::numeric_limits<double>::infinity();
    return negative ? -inf : inf;
  }

  const std::uint64_t bits = (static_cast<std::uint64_t>(negative) << 63) |
                             (static_cast<std::uint64_t>(exp_bits) << 52) |
                             (mant & kFracMask);
  return std::bit_cast<double>(bits);
}

namespace {

void accumulate_range(const TermFn& term, std::uint64_t first, std::uint64_t last,
                      ExactAccumulator& acc) {
  for (std::uint64_t i = first; i <= last; ++i) {
    const double t = term(i);
    if (!std::isfinite(t)) throw nonfinite_term_error(i, t);
    acc.add(t);
  }
}

}  // namespace

double block_sum(const TermFn& term, const BlockPlan& plan) {
  ExactAccumulator acc;
  accumulate_range(term, plan.first(), plan.last(), acc);
  return acc.round();
}

double chunked_parallel_sum(const TermFn& term, const BlockPlan& plan,
                            std::uint64_t chunk, unsigned workers) {
  if (chunk == 0 || chunk > plan.block_size)
    throw std::invalid_argument("chunked_parallel_sum: chunk must be in [1, block_size]");

  const std::uint64_t first = plan.first();
  const std::uint64_t last = plan.last();
  const std::uint64_t n_chunks = (plan.block_size + chunk - 1) / chunk;

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));

  if (workers <= 1) {
    ExactAccumulator acc;
    accumulate_range(term, first, last, acc);
    return acc.round();
  }

  std::vector<ExactAccumulator> partial(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;

  const std::uint64_t per = n_chunks / workers;
  const std::uint64_t extra = n_chunks % workers;

  std::uint64_t next_chunk = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin_chunk = next_chunk;
    const std::uint64_t end_chunk = begin_chunk + per + (w < extra ? 1 : 0);
    next_chunk = end_chunk;
    pool.emplace_back([&, begin_chunk, end_chunk, w] {
      try {
        for (std::uint64_t c = begin_chunk; c < end_chunk; ++c) {
          const std::uint64_t lo = first + c * chunk;
          const std::uint64_t hi = std::min(lo + chunk - 1, last);
          accumulate_range(term, lo, hi, partial[w]);
        }
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  ExactAccumulator total;
  for (auto& p : partial) total.merge(p);
  return total.round();
}

}  // namespace serin
