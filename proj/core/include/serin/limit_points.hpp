#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace serin {

enum class LimitPosteriorMode { dirichlet_finite, dirichlet_process };

/// Base measure over bins: uniform 1/M or geometric 2^-m (truncated at M,
/// leaving mass 2^-M outside the tracked support).
enum class BaseMeasure { uniform, geometric };

/// Power applied to the logistic of the running sum when locating a bin.
struct RhoPolicy {
  enum class Kind { constant, a_minus_b, a_power6 };
  Kind kind = Kind::constant;
  double value = 2.0;  // used by Kind::constant

  /// Resolved exponent; policies that could go nonpositive are floored at eps.
  double resolve(double a, double b, double eps) const;
};

/// Bin index m in 1..M such that the cumulative stage means straddle
/// logistic(running_sum)^rho; saturates to M above the tracked support and to
/// 1 for arbitrarily negative sums. `stage_means` are the posterior means
/// from the previous stage (the prior means before any data).
std::uint32_t assign_bin(double running_sum, double rho,
                         std::span<const double> stage_means);

/*
 * Running Dirichlet (finite) or Dirichlet-process posterior over which bin
 * the running sum S_{1,k} falls into. Bin boundaries adapt every stage: the
 * bin for stage k is chosen against the posterior means after stage k-1.
 *
 * Posterior means after k stages, with A_k = sum_{j<=k} 1/j^2 and c_m the
 * count of hits in bin m:
 *   finite:  (A_k + c_m) / (M A_k + k)
 *   process: (g_m A_k + c_m) / (A_k + k)
 */
class LimitPointState {
 public:
  LimitPointState(LimitPosteriorMode mode, BaseMeasure base, std::uint32_t bins,
                  double rho);

  /// Adds one term to the running sum and files it into a bin; returns the
  /// 1-based bin index. Non-finite terms are rejected.
  std::uint32_t update(double term);

  /// Files a bin observation directly (replay of a precomputed assignment
  /// stream); update() goes through here.
  void record(std::uint32_t bin);

  double mean(std::uint32_t m) const;      // 1-based bin
  double variance(std::uint32_t m) const;  // 1-based bin
  std::vector<double> means() const;

  std::uint32_t bins() const noexcept { return bins_; }
  LimitPosteriorMode mode() const noexcept { return mode_; }
  double rho() const noexcept { return rho_; }
  std::uint64_t stages() const noexcept { return k_; }
  double running_sum() const noexcept { return running_sum_; }
  double prior_mass() const noexcept { return prior_mass_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& base_weights() const noexcept { return base_weights_; }

 private:
  LimitPosteriorMode mode_;
  std::uint32_t bins_;
  double rho_;
  std::vector<double> base_weights_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t k_ = 0;
  double prior_mass_ = 0.0;  // A_k = sum_{j<=k} 1/j^2
  double running_sum_ = 0.0;
};

enum class LimitCall {
  diverges_to_plus_inf,
  needs_convergence_check,  // dominant bin sits at the bottom of the scale
  converged_single_point,
  oscillates,
};

struct LimitPoint {
  std::uint32_t bin = 0;
  double proportion = 0.0;
};

struct LimitPointReport {
  LimitCall call = LimitCall::converged_single_point;
  std::uint32_t dominant_bin = 0;
  double bin_ratio = 0.0;  // dominant_bin / M
  std::vector<LimitPoint> limit_points;
};

struct LimitClassifyOptions {
  double divergence_ratio = 0.9;   // bin_ratio above this: diverges to +inf
  double convergence_ratio = 0.1;  // bin_ratio at or below this: check separately
  double mass_floor = 0.05;        // bins above this posterior mean count as limit points
  std::uint64_t burn_in = 1000;    // stages the thresholds need to settle
};

/// Applies the bin-ratio rule: one heavy bin near the top means divergence to
/// +inf, one in the middle means convergence, one at the bottom defers to the
/// convergence engine; several heavy bins mean oscillation between that many
/// limit points with the bins' means as proportions.
LimitPointReport classify_limit_points(const LimitPointState& state,
                                       const LimitClassifyOptions& options = {});

std::string_view to_string(LimitCall call);

}  // namespace serin
