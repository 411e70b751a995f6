#include "serin/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace serin {

PosteriorState::PosteriorState(PosteriorMode mode, HyperSchedule schedule)
    : mode_(mode), schedule_(std::move(schedule)) {
  if (!schedule_) throw std::invalid_argument("PosteriorState: null hyperparameter schedule");
}

StageObservation PosteriorState::observe(double block_sum, double bound) {
  if (!std::isfinite(block_sum) || !std::isfinite(bound))
    throw std::domain_error("observe: non-finite block sum or bound");
  if (bound < 0.0) throw std::domain_error("observe: negative bound");

  const std::uint64_t j = k_ + 1;
  const auto [alpha, beta] = schedule_(j);
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("observe: hyperparameters must be positive");

  const int y = std::fabs(block_sum) <= bound ? 1 : 0;
  k_ = j;
  sum_alpha_ += alpha;
  sum_beta_ += beta;
  sum_y_ += static_cast<std::uint64_t>(y);
  last_y_ = y;
  last_alpha_ = alpha;
  last_beta_ = beta;
  return StageObservation{j, block_sum, bound, y};
}

double PosteriorState::mean() const {
  if (k_ == 0) throw std::logic_error("posterior mean undefined before any observation");
  if (mode_ == PosteriorMode::non_recursive)
    return nonrecursive_mean(last_y_, last_alpha_, last_beta_);
  return (sum_alpha_ + static_cast<double>(sum_y_)) /
         (static_cast<double>(k_) + sum_alpha_ + sum_beta_);
}

double PosteriorState::variance() const {
  if (k_ == 0) throw std::logic_error("posterior variance undefined before any observation");
  if (mode_ == PosteriorMode::non_recursive)
    return nonrecursive_variance(last_y_, last_alpha_, last_beta_);
  const double a = sum_alpha_ + static_cast<double>(sum_y_);
  const double b = static_cast<double>(k_) + sum_beta_ - static_cast<double>(sum_y_);
  const double s = a + b;
  return (a * b) / (s * s * (s + 1.0));
}

double nonrecursive_mean(int y, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("nonrecursive_mean: hyperparameters must be positive");
  return (alpha + static_cast<double>(y)) / (1.0 + alpha + beta);
}

double nonrecursive_variance(int y, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error("nonrecursive_variance: hyperparameters must be positive");
  const double a = alpha + static_cast<double>(y);
  const double b = 1.0 + beta - static_cast<double>(y);
  const double s = a + b;
  return (a * b) / (s * s * (s + 1.0));
}

Verdict classify(std::span<const double> means, std::span<const double> variances,
                 const ClassifyOptions& options) {
  const std::size_t w = options.window;
  if (w < 2) throw std::invalid_argument("classify: window must be >= 2");
  if (means.size() < w) throw std::invalid_argument("classify: trace shorter than window");
  if (!variances.empty() && variances.size() != means.size())
    throw std::invalid_argument("classify: variance trace length mismatch");

  // Least-squares slope of the last w means against the stage index.
  const std::size_t begin = means.size() - w;
  const double x_mean = (static_cast<double>(w) - 1.0) / 2.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < w; ++i) y_mean += means[begin + i];
  y_mean /= static_cast<double>(w);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double dx = static_cast<double>(i) - x_mean;
    num += dx * (means[begin + i] - y_mean);
    den += dx * dx;
  }
  const double slope = num / den;

  Verdict v;
  v.final_mean = means.back();
  v.final_variance = variances.empty() ? 0.0 : variances.back();
  v.tail_slope = slope;

  const bool declining = means.back() < means[begin];
  if (v.final_mean >= options.mean_high && slope >= 0.0)
    v.label = VerdictLabel::convergent;
  else if (v.final_mean <= options.mean_low || (slope < -options.slope_tol && declining))
    v.label = VerdictLabel::divergent;
  else
    v.label = VerdictLabel::inconclusive;
  return v;
}

std::string_view to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::convergent: return "convergent";
    case VerdictLabel::divergent: return "divergent";
    case VerdictLabel::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace serin
