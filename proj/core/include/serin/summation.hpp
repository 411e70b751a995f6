#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace serin {

/// Term evaluation produced a non-finite value at `index`.
class nonfinite_term_error : public std::domain_error {
 public:
  nonfinite_term_error(std::uint64_t index, double value)
      : std::domain_error("non-finite series term at i=" + std::to_string(index)),
        index_(index),
        value_(value) {}
  std::uint64_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  std::uint64_t index_;
  double value_;
};

/*
 * Exact fixed-point accumulator for IEEE-754 doubles.
 *
 * The running sum is kept as a two's-complement fixed-point integer whose
 * bit k has weight 2^(k - 1074), wide enough to hold any finite double
 * (2^-1074 .. 2^1023 * 1.999...) plus 78 headroom bits, so more than 2^70
 * addends cannot overflow. Every add() is exact; round() returns the sum
 * correctly rounded to the nearest double (ties to even). Because the
 * representation is exact, accumulation order and chunk/thread partitioning
 * cannot change the result, which is what makes block sums reproducible
 * across worker counts.
 */
class ExactAccumulator {
 public:
  static constexpr int kWords = 34;  // 2176 bits

  ExactAccumulator() = default;

  /// Adds a finite double exactly. Non-finite input throws std::invalid_argument.
  void add(double x);

  /// Merges another accumulator exactly (word-wise two's-complement add).
  void merge(const ExactAccumulator& other);

  /// Correctly rounded value of the accumulated sum.
  double round() const;

  bool operator==(const ExactAccumulator&) const = default;

 private:
  void add_magnitude(std::uint64_t mantissa, int bit_pos);
  void sub_magnitude(std::uint64_t mantissa, int bit_pos);

  std::array<std::uint64_t, kWords> words_{};
};

/// One stage's block of consecutive indices: stage j covers
/// [start_index + n*(j-1), start_index + n*j - 1].
struct BlockPlan {
  std::int64_t start_index = 1;
  std::uint64_t block_size = 1;  // n
  std::uint64_t stage = 1;       // j, 1-based

  std::uint64_t first() const {
    return static_cast<std::uint64_t>(start_index) + block_size * (stage - 1);
  }
  std::uint64_t last() const { return first() + block_size - 1; }
};

using TermFn = std::function<double(std::uint64_t)>;

/// Exactly rounded sum of term(i) over the block. Throws nonfinite_term_error
/// when a term evaluates to NaN or infinity.
double block_sum(const TermFn& term, const BlockPlan& plan);

/// Same sum split at fixed `chunk` boundaries, chunks evaluated by up to
/// `workers` threads and merged in ascending order. Exactness of the
/// accumulator makes the result bit-identical to block_sum() for every chunk
/// size and worker count. workers == 0 picks the hardware concurrency.
double chunked_parallel_sum(const TermFn& term, const BlockPlan& plan,
                            std::uint64_t chunk, unsigned workers = 0);

constexpr std::uint64_t kDefaultChunk = 1u << 16;

}  // namespace serin
