#include "serin/catalog.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

namespace serin {

namespace {

constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;
// sin(i pi / 4) is 8-periodic in i; the exact values keep the alternating
// block structure intact at large i, where sin(i * pi/4) in floating point
// would drift off the lattice.
constexpr std::array<double, 8> kSinQuarterPi = {
    0.0, kHalfSqrt2, 1.0, kHalfSqrt2, 0.0, -kHalfSqrt2, -1.0, -kHalfSqrt2};

bool has_a(const SeriesSpec& s) { return !std::isnan(s.a); }
bool has_b(const SeriesSpec& s) { return !std::isnan(s.b); }

double term_example1(std::uint64_t i) { return 1.0 / std::log(static_cast<double>(i)); }

double term_example2(std::uint64_t i, double a) {
  const double x = static_cast<double>(i);
  const double li = std::log(x);
  return std::pow(1.0 - li / x - a * std::log(li) / x, x);
}

double term_example3(std::uint64_t i, double a) {
  const double x = static_cast<double>(i);
  const double li = std::log(x);
  return std::pow(1.0 - (li / x) * std::pow(a, std::log(li) / li), x);
}

double term_example4(std::uint64_t i, double a, double b) {
  const double x = static_cast<double>(i);
  const double li = std::log(x);
  const double lli = std::log(li);
  const double c = std::cos(1.0 / x);
  const double signed_b = (i % 2 == 0) ? b : -b;
  return std::pow(1.0 - li / x - (lli / x) * (c * c) * (a + signed_b), x);
}

double term_example5(std::uint64_t i, double a, double b) {
  const double x = static_cast<double>(i);
  const double li = std::log(x);
  const double lli = std::log(li);
  const double s = std::sin(std::sqrt(lli / li));
  return std::pow(1.0 - (li / x) * (a * (1.0 + s * s) + b * kSinQuarterPi[i % 8]), x);
}

double term_example6(std::uint64_t i, double a, double b) {
  const double x = static_cast<double>(i);
  return std::pow(x, b - 3.0) / (a + std::fabs(std::sin(x)));
}

double term_example7(std::uint64_t i, double a, double b) {
  const double x = static_cast<double>(i);
  return std::pow(std::fabs(std::sin(a * std::numbers::pi * x)), x) / std::pow(x, b);
}

}  // namespace

std::string_view to_string(SeriesId id) {
  switch (id) {
    case SeriesId::example1: return "example1";
    case SeriesId::example2: return "example2";
    case SeriesId::example3: return "example3";
    case SeriesId::example4: return "example4";
    case SeriesId::example5: return "example5";
    case SeriesId::example6: return "example6";
    case SeriesId::example7: return "example7";
    case SeriesId::alternating_unit: return "alternating_unit";
    case SeriesId::mobius_dirichlet: return "mobius_dirichlet";
    case SeriesId::euler_zeta: return "euler_zeta";
  }
  return "?";
}

std::optional<SeriesId> series_from_string(std::string_view name) {
  for (const SeriesId id : all_series())
    if (to_string(id) == name) return id;
  return std::nullopt;
}

std::vector<SeriesId> all_series() {
  return {SeriesId::example1,  SeriesId::example2, SeriesId::example3,
          SeriesId::example4,  SeriesId::example5, SeriesId::example6,
          SeriesId::example7,  SeriesId::alternating_unit,
          SeriesId::mobius_dirichlet, SeriesId::euler_zeta};
}

std::int64_t start_index(SeriesId id) {
  switch (id) {
    case SeriesId::example1:
    case SeriesId::example2: return 2;
    case SeriesId::example3:
    case SeriesId::example4: return 3;
    case SeriesId::example5: return 5;
    default: return 1;
  }
}

std::vector<std::string> param_names(SeriesId id) {
  switch (id) {
    case SeriesId::example1:
    case SeriesId::alternating_unit: return {};
    case SeriesId::example2:
    case SeriesId::example3:
    case SeriesId::mobius_dirichlet:
    case SeriesId::euler_zeta: return {"a"};
    default: return {"a", "b"};
  }
}

void validate_params(const SeriesSpec& spec) {
  const auto names = param_names(spec.id);
  const bool wants_a = !names.empty();
  const bool wants_b = names.size() > 1;
  const auto fail = [&](const std::string& msg) {
    throw std::domain_error(std::string(to_string(spec.id)) + ": " + msg);
  };

  if (wants_a && !has_a(spec)) fail("parameter a is required");
  if (wants_b && !has_b(spec)) fail("parameter b is required");
  if (!wants_a && has_a(spec)) fail("takes no parameter a");
  if (!wants_b && has_b(spec)) fail("takes no parameter b");

  switch (spec.id) {
    case SeriesId::example3:
      if (!(spec.a > 0.0)) fail("requires a > 0");
      break;
    case SeriesId::example4:
      if (!(spec.a >= 0.0) || !(spec.b >= 0.0)) fail("requires a >= 0 and b >= 0");
      break;
    case SeriesId::example5:
      if (!(spec.a > 0.0) || !(spec.b > 0.0)) fail("requires a > 0 and b > 0");
      break;
    case SeriesId::example6:
      // The embedding only makes sense for |a| on the epsilon scale; a large
      // |a| silently changes which series is being studied.
      if (!(std::fabs(spec.a) <= 1e-6)) fail("requires |a| <= 1e-6");
      break;
    case SeriesId::example7:
      if (!(spec.b >= 1.0)) fail("requires b >= 1");
      break;
    default: break;
  }
}

void validate_block_size(SeriesId id, std::uint64_t n) {
  if (n == 0) throw std::domain_error("block size must be positive");
  if (id == SeriesId::example4 && n % 2 != 0)
    throw std::domain_error("example4: block size must be even");
  if (id == SeriesId::example5 && n % 4 != 0)
    throw std::domain_error("example5: block size must be a multiple of 4");
}

double term(const SeriesSpec& spec, std::uint64_t i, const MobiusTable* table) {
  validate_params(spec);
  if (static_cast<std::int64_t>(i) < start_index(spec.id))
    throw std::domain_error("term: index below the series start");
  switch (spec.id) {
    case SeriesId::example1: return term_example1(i);
    case SeriesId::example2: return term_example2(i, spec.a);
    case SeriesId::example3: return term_example3(i, spec.a);
    case SeriesId::example4: return term_example4(i, spec.a, spec.b);
    case SeriesId::example5: return term_example5(i, spec.a, spec.b);
    case SeriesId::example6: return term_example6(i, spec.a, spec.b);
    case SeriesId::example7: return term_example7(i, spec.a, spec.b);
    case SeriesId::alternating_unit: return (i % 2 == 1) ? 1.0 : -1.0;
    case SeriesId::euler_zeta: return std::pow(static_cast<double>(i), -spec.a);
    case SeriesId::mobius_dirichlet: {
      if (table == nullptr)
        throw std::invalid_argument("mobius_dirichlet: a Mobius table is required");
      return static_cast<double>(table->mu(i)) * std::pow(static_cast<double>(i), -spec.a);
    }
  }
  throw std::logic_error("unknown series id");
}

TermFn term_function(const SeriesSpec& spec, std::shared_ptr<const MobiusTable> table) {
  validate_params(spec);
  const double a = spec.a;
  const double b = spec.b;
  switch (spec.id) {
    case SeriesId::example1: return [](std::uint64_t i) { return term_example1(i); };
    case SeriesId::example2: return [a](std::uint64_t i) { return term_example2(i, a); };
    case SeriesId::example3: return [a](std::uint64_t i) { return term_example3(i, a); };
    case SeriesId::example4: return [a, b](std::uint64_t i) { return term_example4(i, a, b); };
    case SeriesId::example5: return [a, b](std::uint64_t i) { return term_example5(i, a, b); };
    case SeriesId::example6: return [a, b](std::uint64_t i) { return term_example6(i, a, b); };
    case SeriesId::example7: return [a, b](std::uint64_t i) { return term_example7(i, a, b); };
    case SeriesId::alternating_unit:
      return [](std::uint64_t i) { return (i % 2 == 1) ? 1.0 : -1.0; };
    case SeriesId::euler_zeta:
      return [a](std::uint64_t i) { return std::pow(static_cast<double>(i), -a); };
    case SeriesId::mobius_dirichlet: {
      if (!table) throw std::invalid_argument("mobius_dirichlet: a Mobius table is required");
      return [a, table = std::move(table)](std::uint64_t i) {
        return static_cast<double>(table->mu(i)) * std::pow(static_cast<double>(i), -a);
      };
    }
  }
  throw std::logic_error("unknown series id");
}

std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::inverse_sqrt: return "inverse_sqrt";
    case BoundId::example2: return "example2";
    case BoundId::example3: return "example3";
    case BoundId::example4: return "example4";
    case BoundId::example5: return "example5";
    case BoundId::example6: return "example6";
    case BoundId::example7: return "example7";
    case BoundId::riemann: return "riemann";
  }
  return "?";
}

std::optional<BoundId> bound_from_string(std::string_view name) {
  for (const BoundId id :
       {BoundId::inverse_sqrt, BoundId::example2, BoundId::example3, BoundId::example4,
        BoundId::example5, BoundId::example6, BoundId::example7, BoundId::riemann})
    if (to_string(id) == name) return id;
  return std::nullopt;
}

BoundId default_bound_for(SeriesId id) {
  switch (id) {
    case SeriesId::example2: return BoundId::example2;
    case SeriesId::example3: return BoundId::example3;
    case SeriesId::example4: return BoundId::example4;
    case SeriesId::example5: return BoundId::example5;
    case SeriesId::example6: return BoundId::example6;
    case SeriesId::example7: return BoundId::example7;
    case SeriesId::mobius_dirichlet: return BoundId::riemann;
    default: return BoundId::inverse_sqrt;
  }
}

std::optional<SeriesSpec> reference_series(const BoundSpec& bound) {
  constexpr double unset = std::numeric_limits<double>::quiet_NaN();
  const double e = bound.epsilon;
  switch (bound.id) {
    case BoundId::inverse_sqrt: return std::nullopt;
    case BoundId::example2: return SeriesSpec{SeriesId::example2, 1.0 + e, unset};
    case BoundId::example3:
      return SeriesSpec{SeriesId::example3, std::numbers::e + e, unset};
    case BoundId::example4: return SeriesSpec{SeriesId::example4, 1.0 + e, 0.0};
    case BoundId::example5: return SeriesSpec{SeriesId::example5, 1.0 + e, e};
    case BoundId::example6: return SeriesSpec{SeriesId::example6, e, 2.0 - e};
    case BoundId::example7:
      return SeriesSpec{SeriesId::example7, 1.0 / std::numbers::pi, 1.0 + e};
    case BoundId::riemann: return SeriesSpec{SeriesId::mobius_dirichlet, 1.0, unset};
  }
  return std::nullopt;
}

double bound_value(const BoundSpec& bound, std::uint64_t j, std::uint64_t n,
                   const SeriesSpec& target, std::span<const double> ref_sums) {
  if (j == 0) throw std::invalid_argument("bound_value: stage is 1-based");
  const double jd = static_cast<double>(j);
  if (bound.id == BoundId::inverse_sqrt)
    return 1.0 / std::sqrt(static_cast<double>(n) * jd);

  if (ref_sums.size() < j)
    throw std::invalid_argument("bound_value: missing reference block sum for stage");
  const double ref = ref_sums[j - 1];
  const double eps = bound.epsilon;
  const double adjust = 0.9 * eps;  // keeps c above the reference at the anchor point

  switch (bound.id) {
    case BoundId::example2: {
      const double u = ref + (target.a - 1.0 - adjust) / std::log(jd + 1.0);
      return u > 0.0 ? u : ref;
    }
    case BoundId::example3: {
      const double u = ref + (target.a - std::numbers::e - adjust) / std::log(jd + 1.0);
      return u > 0.0 ? u : ref;
    }
    case BoundId::example4:
    case BoundId::example5: {
      const double u = ref + (target.a - 1.0 - target.b - adjust) / std::log(jd + 1.0);
      return u > 0.0 ? u : ref;
    }
    case BoundId::example6: {
      const double base = std::fabs(target.a) - target.b + 2.0 - 2.0 * eps;
      const double tilt = target.b < 2.0 ? 1e-5 : -1e-5;
      return ref + (base + tilt) / std::log(jd + 1.0);
    }
    case BoundId::example7:
      return ref + eps / jd;
    case BoundId::riemann:
      return std::fabs(ref + target.a / (jd + 1.0));
    default:
      throw std::logic_error("unknown bound id");
  }
}

namespace {

std::string cache_file_name(const SeriesSpec& ref, std::uint64_t n, std::uint64_t stages) {
  // FNV-1a over the exact parameter bits; the loader re-validates the header.
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(ref.id));
  mix(std::bit_cast<std::uint64_t>(ref.a));
  mix(std::bit_cast<std::uint64_t>(ref.b));
  char buf[160];
  std::snprintf(buf, sizeof buf, "refsums-%s-n%llu-K%llu-%016llx.bin",
                std::string(to_string(ref.id)).c_str(),
                static_cast<unsigned long long>(n), static_cast<unsigned long long>(stages),
                static_cast<unsigned long long>(h));
  return buf;
}

constexpr char kRefMagic[8] = {'S', 'R', 'E', 'F', 'S', 'U', 'M', '1'};

struct RefHeader {
  char magic[8];
  std::uint64_t series;
  std::uint64_t a_bits;
  std::uint64_t b_bits;
  std::uint64_t n;
  std::uint64_t stages;
};

std::optional<std::vector<double>> try_load_ref(const std::filesystem::path& file,
                                                const SeriesSpec& ref, std::uint64_t n,
                                                std::uint64_t stages) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  RefHeader h{};
  if (!in.read(reinterpret_cast<char*>(&h), sizeof h)) return std::nullopt;
  if (std::memcmp(h.magic, kRefMagic, 8) != 0) return std::nullopt;
  if (h.series != static_cast<std::uint64_t>(ref.id)) return std::nullopt;
  if (h.a_bits != std::bit_cast<std::uint64_t>(ref.a)) return std::nullopt;
  if (h.b_bits != std::bit_cast<std::uint64_t>(ref.b)) return std::nullopt;
  if (h.n != n || h.stages != stages) return std::nullopt;
  std::vector<double> sums(stages);
  if (!in.read(reinterpret_cast<char*>(sums.data()),
               static_cast<std::streamsize>(stages * sizeof(double))))
    return std::nullopt;
  return sums;
}

void store_ref(const std::filesystem::path& file, const SeriesSpec& ref, std::uint64_t n,
               std::uint64_t stages, const std::vector<double>& sums) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) return;  // cache is best-effort
  RefHeader h{};
  std::memcpy(h.magic, kRefMagic, 8);
  h.series = static_cast<std::uint64_t>(ref.id);
  h.a_bits = std::bit_cast<std::uint64_t>(ref.a);
  h.b_bits = std::bit_cast<std::uint64_t>(ref.b);
  h.n = n;
  h.stages = stages;
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  out.write(reinterpret_cast<const char*>(sums.data()),
            static_cast<std::streamsize>(sums.size() * sizeof(double)));
}

}  // namespace

std::vector<double> reference_block_sums(const SeriesSpec& ref, std::uint64_t n,
                                         std::uint64_t stages, const SumOptions& opts,
                                         std::shared_ptr<const MobiusTable> table,
                                         const std::optional<std::filesystem::path>& cache_dir) {
  if (stages == 0) return {};
  validate_params(ref);

  std::optional<std::filesystem::path> cache_file;
  if (cache_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir, ec);
    cache_file = *cache_dir / cache_file_name(ref, n, stages);
    if (auto cached = try_load_ref(*cache_file, ref, n, stages)) return std::move(*cached);
  }

  const TermFn fn = term_function(ref, std::move(table));
  const std::uint64_t chunk = std::min<std::uint64_t>(std::max<std::uint64_t>(opts.chunk, 1), n);
  std::vector<double> sums(stages);
  for (std::uint64_t j = 1; j <= stages; ++j) {
    const BlockPlan plan{start_index(ref.id), n, j};
    sums[j - 1] = chunked_parallel_sum(fn, plan, chunk, opts.threads);
  }

  if (cache_file) store_ref(*cache_file, ref, n, stages, sums);
  return sums;
}

std::pair<double, double> check_monotonicity(SeriesId id, std::uint64_t j, std::uint64_t n,
                                             const SeriesSpec& theta,
                                             const SeriesSpec& theta_prime) {
  if (id != SeriesId::example4 && id != SeriesId::example5)
    throw std::domain_error("check_monotonicity: only example4 and example5 carry the ordering");
  if (theta.id != id || theta_prime.id != id)
    throw std::domain_error("check_monotonicity: parameter points must match the series");
  validate_block_size(id, n);
  validate_params(theta);
  validate_params(theta_prime);

  const BlockPlan plan{start_index(id), n, j};
  const double lhs = block_sum(term_function(theta), plan);
  const double rhs = block_sum(term_function(theta_prime), plan);
  return {lhs, rhs};
}

}  // namespace serin
