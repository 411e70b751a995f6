#include "serin/limit_points.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace serin {

double RhoPolicy::resolve(double a, double b, double eps) const {
  double rho = value;
  switch (kind) {
    case Kind::constant: break;
    case Kind::a_minus_b: rho = a - b + eps; break;
    case Kind::a_power6: rho = a * a * a * a * a * a; break;
  }
  return std::max(rho, eps);
}

namespace {

double logistic(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace

std::uint32_t assign_bin(double running_sum, double rho,
                         std::span<const double> stage_means) {
  if (stage_means.size() < 2) throw std::invalid_argument("assign_bin: need at least 2 bins");
  if (!(rho > 0.0)) throw std::invalid_argument("assign_bin: rho must be positive");

  const double t = std::pow(logistic(running_sum), rho);
  const auto m_count = static_cast<std::uint32_t>(stage_means.size());
  double cumulative = 0.0;
  for (std::uint32_t m = 0; m < m_count; ++m) {
    cumulative += stage_means[m];
    if (t <= cumulative) return m + 1;
  }
  return m_count;  // above the tracked support, including t >= 1
}

LimitPointState::LimitPointState(LimitPosteriorMode mode, BaseMeasure base,
                                 std::uint32_t bins, double rho)
    : mode_(mode), bins_(bins), rho_(rho) {
  if (bins < 2) throw std::invalid_argument("LimitPointState: need at least 2 bins");
  if (!(rho > 0.0)) throw std::invalid_argument("LimitPointState: rho must be positive");
  base_weights_.resize(bins);
  if (base == BaseMeasure::uniform) {
    std::fill(base_weights_.begin(), base_weights_.end(), 1.0 / bins);
  } else {
    for (std::uint32_t m = 0; m < bins; ++m) base_weights_[m] = std::ldexp(1.0, -(int(m) + 1));
  }
  counts_.assign(bins, 0);
}

double LimitPointState::mean(std::uint32_t m) const {
  if (m == 0 || m > bins_) throw std::out_of_range("mean: bin index outside 1..M");
  if (k_ == 0) {
    // Prior mean of the first stage, before any data.
    return mode_ == LimitPosteriorMode::dirichlet_finite ? 1.0 / bins_
                                                         : base_weights_[m - 1];
  }
  const double c = static_cast<double>(counts_[m - 1]);
  const double k = static_cast<double>(k_);
  if (mode_ == LimitPosteriorMode::dirichlet_finite)
    return (prior_mass_ + c) / (bins_ * prior_mass_ + k);
  return (base_weights_[m - 1] * prior_mass_ + c) / (prior_mass_ + k);
}

double LimitPointState::variance(std::uint32_t m) const {
  if (m == 0 || m > bins_) throw std::out_of_range("variance: bin index outside 1..M");
  if (k_ == 0) throw std::logic_error("variance undefined before any observation");
  const double c = static_cast<double>(counts_[m - 1]);
  const double k = static_cast<double>(k_);
  // Marginal Beta(w_m, W - w_m) moments of the posterior with per-bin weight
  // w_m and total mass W.
  double w_m, total;
  if (mode_ == LimitPosteriorMode::dirichlet_finite) {
    w_m = prior_mass_ + c;
    total = bins_ * prior_mass_ + k;
  } else {
    w_m = base_weights_[m - 1] * prior_mass_ + c;
    total = prior_mass_ + k;
  }
  return w_m * (total - w_m) / (total * total * (total + 1.0));
}

std::vector<double> LimitPointState::means() const {
  std::vector<double> out(bins_);
  for (std::uint32_t m = 1; m <= bins_; ++m) out[m - 1] = mean(m);
  return out;
}

void LimitPointState::record(std::uint32_t bin) {
  if (bin == 0 || bin > bins_) throw std::out_of_range("record: bin index outside 1..M");
  counts_[bin - 1] += 1;
  k_ += 1;
  const double j = static_cast<double>(k_);
  prior_mass_ += 1.0 / (j * j);
}

std::uint32_t LimitPointState::update(double term) {
  if (!std::isfinite(term)) throw std::domain_error("update: non-finite term");
  running_sum_ += term;
  const std::vector<double> stage_means = means();
  const std::uint32_t bin = assign_bin(running_sum_, rho_, stage_means);
  record(bin);
  return bin;
}

LimitPointReport classify_limit_points(const LimitPointState& state,
                                       const LimitClassifyOptions& options) {
  if (state.stages() < options.burn_in)
    throw std::domain_error("classify_limit_points: fewer stages than the burn-in");

  const std::vector<double> means = state.means();
  LimitPointReport report;
  for (std::uint32_t m = 1; m <= state.bins(); ++m)
    if (means[m - 1] >= options.mass_floor)
      report.limit_points.push_back({m, means[m - 1]});

  const auto argmax = static_cast<std::uint32_t>(
      std::distance(means.begin(), std::max_element(means.begin(), means.end())) + 1);

  if (report.limit_points.size() >= 2) {
    report.call = LimitCall::oscillates;
    report.dominant_bin = argmax;
    report.bin_ratio = static_cast<double>(argmax) / state.bins();
    return report;
  }

  report.dominant_bin = argmax;
  report.bin_ratio = static_cast<double>(argmax) / state.bins();
  if (report.limit_points.empty())
    report.limit_points.push_back({argmax, means[argmax - 1]});

  if (report.bin_ratio > options.divergence_ratio)
    report.call = LimitCall::diverges_to_plus_inf;
  else if (report.bin_ratio <= options.convergence_ratio)
    report.call = LimitCall::needs_convergence_check;
  else
    report.call = LimitCall::converged_single_point;
  return report;
}

std::string_view to_string(LimitCall call) {
  switch (call) {
    case LimitCall::diverges_to_plus_inf: return "diverges_to_plus_inf";
    case LimitCall::needs_convergence_check: return "needs_convergence_check";
    case LimitCall::converged_single_point: return "converged_single_point";
    case LimitCall::oscillates: return "oscillates";
  }
  return "?";
}

}  // namespace serin
