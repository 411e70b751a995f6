#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serin/mobius.hpp"
#include "serin/summation.hpp"

namespace serin {

enum class SeriesId {
  example1,         // sum 1/log(i), i >= 2
  example2,         // sum (1 - log(i)/i - a loglog(i)/i)^i, i >= 2
  example3,         // sum (1 - (log(i)/i) a^(loglog(i)/log(i)))^i, i >= 3
  example4,         // sum (1 - log i/i - (loglog i/i) cos^2(1/i) (a + (-1)^i b))^i, i >= 3
  example5,         // sum (1 - (log i/i)(a(1+sin^2 sqrt(loglog i/log i)) + b sin(i pi/4)))^i, i >= 5
  example6,         // sum i^(b-3) / (a + |sin i|), i >= 1
  example7,         // sum |sin(a pi i)|^i / i^b, i >= 1
  alternating_unit, // sum (-1)^(i-1)
  mobius_dirichlet, // sum mu(i) / i^a
  euler_zeta,       // sum 1 / i^a
};

/// A catalog series at a parameter point. Unused parameters stay NaN.
struct SeriesSpec {
  SeriesId id = SeriesId::example1;
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
};

std::string_view to_string(SeriesId id);
std::optional<SeriesId> series_from_string(std::string_view name);
std::vector<SeriesId> all_series();

/// First summed index of the series.
std::int64_t start_index(SeriesId id);

/// Names of parameters the series requires ("a", "b").
std::vector<std::string> param_names(SeriesId id);

/// Throws std::domain_error when required parameters are missing, unused ones
/// are set, or values fall outside the series' domain.
void validate_params(const SeriesSpec& spec);

/// Block-size constraint, if any (example4 needs even n, example5 n % 4 == 0).
void validate_block_size(SeriesId id, std::uint64_t n);

/// Term X_i. A mobius_dirichlet spec needs the table; other series ignore it.
double term(const SeriesSpec& spec, std::uint64_t i, const MobiusTable* table = nullptr);

/// Resolved closure for hot loops; validates the spec once up front.
TermFn term_function(const SeriesSpec& spec,
                     std::shared_ptr<const MobiusTable> table = nullptr);

enum class BoundId {
  inverse_sqrt,  // c = 1/sqrt(n j)
  example2,      // c = ref + (a-1-0.9e)/log(j+1), positive-part fallback to ref
  example3,      // c = ref + (a-e-0.9e)/log(j+1), fallback to ref
  example4,      // c = ref + (a-1-b-0.9e)/log(j+1), fallback to ref
  example5,      // same shape as example4 with its own reference point
  example6,      // c = ref + (|a|-b+2-2e +- 1e-5)/log(j+1), sign by b<2
  example7,      // c = ref + e/j
  riemann,       // c = |ref + a/(j+1)|
};

struct BoundSpec {
  BoundId id = BoundId::inverse_sqrt;
  double epsilon = 1e-10;
};

std::string_view to_string(BoundId id);
std::optional<BoundId> bound_from_string(std::string_view name);

/// The bound the series was analyzed with.
BoundId default_bound_for(SeriesId id);

/// Parameter point of the reference series whose block sums anchor the bound;
/// empty for bounds that need no reference (inverse_sqrt).
std::optional<SeriesSpec> reference_series(const BoundSpec& bound);

/// Threshold c_j. `ref_sums[j-1]` must hold the reference block sum where the
/// bound uses one; bounds without a reference accept an empty span.
double bound_value(const BoundSpec& bound, std::uint64_t j, std::uint64_t n,
                   const SeriesSpec& target, std::span<const double> ref_sums);

struct SumOptions {
  std::uint64_t chunk = kDefaultChunk;
  unsigned threads = 0;
};

/// Block sums S_j of `ref` for j = 1..stages, persisted under cache_dir when
/// given (keyed by series, parameters, n and stage count) so parameter sweeps
/// reuse one reference computation.
std::vector<double> reference_block_sums(
    const SeriesSpec& ref, std::uint64_t n, std::uint64_t stages,
    const SumOptions& opts = {}, std::shared_ptr<const MobiusTable> table = nullptr,
    const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

/// Block sums S_j at two parameter points, for the partial-sum ordering
/// checks (example4: decreasing in a, increasing in b for even n; example5:
/// the same for n divisible by 4). Enforces the parity precondition.
std::pair<double, double> check_monotonicity(SeriesId id, std::uint64_t j, std::uint64_t n,
                                             const SeriesSpec& theta,
                                             const SeriesSpec& theta_prime);

}  // namespace serin
