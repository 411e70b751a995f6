#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>

namespace serin {

/// Stage-j Beta hyperparameters (alpha_j, beta_j).
using HyperSchedule = std::function<std::pair<double, double>(std::uint64_t)>;

/// The accumulation schedule alpha_j = beta_j = 1/j^2.
inline std::pair<double, double> inverse_square_schedule(std::uint64_t j) {
  const double v = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
  return {v, v};
}

enum class PosteriorMode { recursive, non_recursive };

/// One consumed stage: indicator y = [|block_sum| <= bound].
struct StageObservation {
  std::uint64_t stage = 0;
  double block_sum = 0.0;
  double bound = 0.0;
  int indicator = 0;
};

/*
 * Running Beta posterior over the probability that the series converges.
 *
 * Recursive mode accumulates hyperparameters stage by stage; after k stages
 * the posterior is Beta(sum_alpha + sum_y, k + sum_beta - sum_y). In
 * non-recursive mode each stage stands alone with prior Beta(alpha_k, beta_k)
 * and only the latest indicator matters.
 */
class PosteriorState {
 public:
  explicit PosteriorState(PosteriorMode mode = PosteriorMode::recursive,
                          HyperSchedule schedule = inverse_square_schedule);

  /// Consumes one stage. Requires finite block_sum, finite bound >= 0.
  /// Boundary |s| == c counts as y = 1.
  StageObservation observe(double block_sum, double bound);

  /// Posterior mean after k >= 1 stages.
  double mean() const;
  /// Posterior variance after k >= 1 stages.
  double variance() const;

  PosteriorMode mode() const noexcept { return mode_; }
  std::uint64_t stages() const noexcept { return k_; }
  std::uint64_t ones() const noexcept { return sum_y_; }
  double sum_alpha() const noexcept { return sum_alpha_; }
  double sum_beta() const noexcept { return sum_beta_; }

 private:
  PosteriorMode mode_;
  HyperSchedule schedule_;
  std::uint64_t k_ = 0;
  double sum_alpha_ = 0.0;
  double sum_beta_ = 0.0;
  std::uint64_t sum_y_ = 0;
  // latest stage, used by non-recursive mode
  int last_y_ = 0;
  double last_alpha_ = 0.0;
  double last_beta_ = 0.0;
};

/// Stand-alone stage posterior mean (alpha + y) / (1 + alpha + beta).
/// Hyperparameters must be strictly positive.
double nonrecursive_mean(int y, double alpha, double beta);

/// Matching Beta variance (alpha + y)(1 + beta - y) / ((1+a+b)^2 (2+a+b)).
double nonrecursive_variance(int y, double alpha, double beta);

enum class VerdictLabel { convergent, divergent, inconclusive };

struct Verdict {
  VerdictLabel label = VerdictLabel::inconclusive;
  double final_mean = 0.0;
  double final_variance = 0.0;
  double tail_slope = 0.0;  // least-squares mean drift per stage over the last window
};

struct ClassifyOptions {
  std::size_t window = 500;
  double mean_high = 0.9;
  double mean_low = 0.1;
  double slope_tol = 1e-6;
};

/// Classifies a finite posterior-mean trace. Convergent when the final mean
/// clears mean_high with a non-negative tail slope; divergent when the final
/// mean falls below mean_low or the tail is clearly declining (the sudden
/// late-collapse pattern); inconclusive otherwise. Trace must hold at least
/// `window` entries and window >= 2.
Verdict classify(std::span<const double> means, std::span<const double> variances,
                 const ClassifyOptions& options = {});

std::string_view to_string(VerdictLabel label);

}  // namespace serin
