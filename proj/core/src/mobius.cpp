#include "serin/mobius.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

namespace serin {

namespace {

constexpr char kMagic[8] = {'M', 'U', 'T', 'A', 'B', 'L', 'E', '1'};

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return primes;
}

// mu over [lo, hi] (inclusive, 1-based values), written to out[0..hi-lo].
void sieve_segment(std::uint64_t lo, std::uint64_t hi,
                   const std::vector<std::uint64_t>& primes, std::int8_t* out) {
  const std::uint64_t len = hi - lo + 1;
  std::vector<std::int8_t> sign(len, 1);
  std::vector<char> squared(len, 0);
  std::vector<std::uint64_t> rem(len);
  for (std::uint64_t i = 0; i < len; ++i) rem[i] = lo + i;

  for (const std::uint64_t p : primes) {
    if (p * p > hi) break;
    std::uint64_t q = ((lo + p - 1) / p) * p;
    for (; q <= hi; q += p) {
      const std::uint64_t i = q - lo;
      sign[i] = static_cast<std::int8_t>(-sign[i]);
      rem[i] /= p;
    }
    const std::uint64_t p2 = p * p;
    if (p2 > hi) continue;
    q = ((lo + p2 - 1) / p2) * p2;
    for (; q <= hi; q += p2) squared[q - lo] = 1;
  }

  for (std::uint64_t i = 0; i < len; ++i) {
    if (squared[i]) {
      out[i] = 0;
    } else {
      // A leftover cofactor is a single prime > sqrt(N) with exponent 1.
      out[i] = rem[i] > 1 ? static_cast<std::int8_t>(-sign[i]) : sign[i];
    }
  }
  if (lo == 1) out[0] = 1;
}

}  // namespace

MobiusTable MobiusTable::build(std::uint64_t limit, std::uint64_t segment_size,
                               unsigned threads) {
  if (limit < 1) throw std::invalid_argument("MobiusTable::build: limit must be >= 1");
  if (segment_size < 1) throw std::invalid_argument("MobiusTable::build: segment must be >= 1");

  const auto primes = primes_up_to(isqrt(limit));
  std::vector<std::int8_t> values(limit);

  const std::uint64_t n_segments = (limit + segment_size - 1) / segment_size;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_segments));

  if (threads <= 1) {
    for (std::uint64_t s = 0; s < n_segments; ++s) {
      const std::uint64_t lo = 1 + s * segment_size;
      const std::uint64_t hi = std::min(lo + segment_size - 1, limit);
      sieve_segment(lo, hi, primes, values.data() + (lo - 1));
    }
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::uint64_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t s = next.fetch_add(1);
          if (s >= n_segments) return;
          const std::uint64_t lo = 1 + s * segment_size;
          const std::uint64_t hi = std::min(lo + segment_size - 1, limit);
          sieve_segment(lo, hi, primes, values.data() + (lo - 1));
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return MobiusTable(limit, std::move(values));
}

std::int64_t MobiusTable::mertens(std::uint64_t x) const {
  if (x > limit_) throw std::out_of_range("mertens: x exceeds table limit");
  std::int64_t acc = 0;
  for (std::uint64_t n = 0; n < x; ++n) acc += values_[n];
  return acc;
}

void MobiusTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw table_error("cannot open table file for writing: " + path.string());
  out.write(kMagic, sizeof kMagic);
  std::uint64_t n = limit_;
  char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((n >> (8 * i)) & 0xFF);
  out.write(le, 8);
  out.write(reinterpret_cast<const char*>(values_.data()),
            static_cast<std::streamsize>(values_.size()));
  if (!out) throw table_error("short write while saving table: " + path.string());
}

MobiusTable MobiusTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw table_error("cannot open table file: " + path.string());

  char magic[8];
  if (!in.read(magic, 8)) throw table_truncated_error("table header truncated: " + path.string());
  if (std::memcmp(magic, kMagic, 7) != 0)
    throw table_format_error("not a Mobius table: " + path.string());
  if (magic[7] != kMagic[7])
    throw table_version_error("unsupported table version: " + path.string());

  char le[8];
  if (!in.read(le, 8)) throw table_truncated_error("table header truncated: " + path.string());
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i)
    n |= static_cast<std::uint64_t>(static_cast<unsigned char>(le[i])) << (8 * i);
  if (n == 0) throw table_format_error("table declares zero entries: " + path.string());

  std::vector<std::int8_t> values(n);
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n)))
    throw table_truncated_error("table data truncated: " + path.string());

  for (const std::int8_t v : values)
    if (v < -1 || v > 1) throw table_format_error("table holds values outside {-1,0,1}");
  return MobiusTable(n, std::move(values));
}

}  // namespace serin
