#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace serin {

class table_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// File does not look like a Mobius table at all.
class table_format_error : public table_error {
  using table_error::table_error;
};
/// Recognized family, unsupported layout version.
class table_version_error : public table_error {
  using table_error::table_error;
};
/// Header promises more values than the file holds.
class table_truncated_error : public table_error {
  using table_error::table_error;
};

/*
 * Table of mu(n) for n = 1..N built by a segmented sieve: base primes up to
 * sqrt(N) are sieved once, then each segment divides out prime factors to
 * detect squared factors and count prime-factor parity. Segments are
 * independent, so builds parallelize over disjoint output ranges and the
 * result does not depend on the segment size or thread count.
 *
 * On disk: 8-byte magic "MUTABLE1", u64 N (little-endian), then N signed
 * bytes mu(1..N).
 */
class MobiusTable {
 public:
  /// threads == 0 picks the hardware concurrency.
  static MobiusTable build(std::uint64_t limit, std::uint64_t segment_size,
                           unsigned threads = 0);

  static MobiusTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::uint64_t limit() const noexcept { return limit_; }

  /// mu(n) for 1 <= n <= limit().
  int mu(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw std::out_of_range("mu: index outside table");
    return values_[n - 1];
  }

  /// Exact Mertens sum M(x) = sum_{n<=x} mu(n); x <= limit().
  std::int64_t mertens(std::uint64_t x) const;

  const std::vector<std::int8_t>& values() const noexcept { return values_; }

  bool operator==(const MobiusTable&) const = default;

 private:
  MobiusTable(std::uint64_t limit, std::vector<std::int8_t> values)
      : limit_(limit), values_(std::move(values)) {}

  std::uint64_t limit_ = 0;
  std::vector<std::int8_t> values_;
};

}  // namespace serin
