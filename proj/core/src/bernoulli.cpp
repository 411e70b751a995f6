#include "serin/bernoulli.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace serin::bernoulli {

namespace {

using big_int = boost::multiprecision::cpp_int;
using big_float = boost::multiprecision::cpp_bin_float_100;

std::vector<rational>& bernoulli_cache() {
  static std::vector<rational> cache{rational(1), rational(-1, 2)};
  return cache;
}
std::mutex& bernoulli_mutex() {
  static std::mutex m;
  return m;
}

void extend_bernoulli(std::vector<rational>& cache, unsigned n) {
  while (cache.size() <= n) {
    const unsigned k = static_cast<unsigned>(cache.size());
    if (k % 2 == 1) {
      cache.emplace_back(0);
      continue;
    }
    // B_k = -1/(k+1) * sum_{i=0}^{k-1} C(k+1, i) B_i
    rational acc(0);
    big_int binom(1);  // C(k+1, i), updated multiplicatively
    for (unsigned i = 0; i < k; ++i) {
      if (cache[i] != 0) acc += rational(binom) * cache[i];
      binom = binom * (k + 1 - i) / (i + 1);
    }
    cache.emplace_back(-acc / (k + 1));
  }
}

}  // namespace

const rational& bernoulli_exact(unsigned n) {
  std::scoped_lock lock(bernoulli_mutex());
  auto& cache = bernoulli_cache();
  extend_bernoulli(cache, n);
  return cache[n];
}

double bernoulli_double(unsigned n) {
  const rational b = bernoulli_exact(n);
  const double v = static_cast<double>(big_float(b));
  if (!std::isfinite(v)) throw std::overflow_error("B_n exceeds the double range");
  return v;
}

double log_abs_bernoulli_exact(unsigned n) {
  const rational b = bernoulli_exact(n);
  if (b == 0) throw std::domain_error("log|B_n| undefined: B_n = 0");
  return static_cast<double>(log(abs(big_float(b))));
}

double log_abs_bernoulli_asymptotic(unsigned m) {
  if (m == 0) throw std::domain_error("asymptotic form needs m >= 1");
  const double md = static_cast<double>(m);
  return std::log(4.0 * std::sqrt(std::numbers::pi * md)) +
         2.0 * md * std::log(md / (std::numbers::pi * std::numbers::e));
}

double zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("zeta: needs s > 1");
  // Cohen-Rodriguez Villegas-Zagier acceleration of
  // eta(s) = sum (-1)^(k-1) k^-s; error ~ (3+sqrt 8)^-n.
  constexpr int n = 36;
  long double d = std::pow(3.0L + std::sqrt(8.0L), static_cast<long double>(n));
  d = (d + 1.0L / d) / 2.0L;
  long double b = -1.0L, c = -d, eta = 0.0L;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    eta += c * std::pow(static_cast<long double>(k + 1), static_cast<long double>(-s));
    b = (k + n) * (k - n) * b / ((k + 0.5L) * (k + 1));
  }
  eta /= d;
  const long double scale = 1.0L - std::pow(2.0L, static_cast<long double>(1.0 - s));
  return static_cast<double>(eta / scale);
}

double bernoulli_zeta_route(unsigned two_m) {
  if (two_m < 2 || two_m % 2 != 0)
    throw std::domain_error("bernoulli_zeta_route: needs an even index >= 2");
  const unsigned m = two_m / 2;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double log_mag = std::lgammal(static_cast<long double>(two_m) + 1.0L) +
                              std::log(2.0L) -
                              static_cast<long double>(two_m) * std::log(two_pi) +
                              std::log(static_cast<long double>(zeta(two_m)));
  const long double mag = std::exp(log_mag);
  if (!std::isfinite(static_cast<double>(mag)))
    throw std::overflow_error("B_n exceeds the double range");
  return static_cast<double>((m % 2 == 1) ? mag : -mag);
}

std::string_view to_string(ProbeSeries s) { return s == ProbeSeries::s1 ? "s1" : "s2"; }
std::string_view to_string(TermMode m) { return m == TermMode::exact ? "exact" : "stirling"; }

BernoulliTermRow series_term(ProbeSeries series, unsigned m, TermMode mode,
                             double condition_limit) {
  if (m == 0) throw std::domain_error("series_term: m starts at 1");

  const auto log_abs_b = [&](unsigned idx) {
    return mode == TermMode::exact ? log_abs_bernoulli_exact(idx)
                                   : log_abs_bernoulli_asymptotic(idx / 2);
  };

  // Inner summand k: weight C(2m+1,k) C(4m+2-2k,2m+1) / (2m+2-2k) in logs,
  // times the log-magnitude factor L_k; evaluated by signed log-sum-exp.
  std::vector<double> log_mag(m + 1);
  std::vector<int> sign(m + 1);
  double peak = -std::numeric_limits<double>::infinity();
  const double ln_2pi = std::log(2.0 * std::numbers::pi);

  for (unsigned k = 0; k <= m; ++k) {
    const double log_w = std::lgamma(2.0 * m + 2.0) - std::lgamma(k + 1.0) -
                         std::lgamma(2.0 * m + 2.0 - k) +
                         std::lgamma(4.0 * m + 3.0 - 2.0 * k) -
                         std::lgamma(2.0 * m + 2.0) -
                         std::lgamma(2.0 * m + 2.0 - 2.0 * k) -
                         std::log(2.0 * m + 2.0 - 2.0 * k);
    const unsigned n = m - k;
    double L;
    if (series == ProbeSeries::s1) {
      L = (2.0 * n + 2.0) * ln_2pi + log_abs_b(2 * n + 2) - std::log(2.0) -
          2.0 * std::log(2.0 * n + 2.0) - std::lgamma(2.0 * n + 1.0);
    } else {
      L = std::log(2.0 * n + 1.0) + log_abs_b(2 * n + 2) - log_abs_b(2 * n + 4);
    }
    if (L == 0.0) {
      log_mag[k] = -std::numeric_limits<double>::infinity();
      sign[k] = 1;
      continue;
    }
    log_mag[k] = log_w + std::log(std::fabs(L));
    sign[k] = ((k % 2 == 0) == (L > 0.0)) ? 1 : -1;
    peak = std::max(peak, log_mag[k]);
  }

  double total = 0.0;
  for (unsigned k = 0; k <= m; ++k)
    total += sign[k] * std::exp(log_mag[k] - peak);

  const double condition =
      total == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::fabs(total);
  if (!(condition < condition_limit)) throw precision_loss_error(m, condition);

  BernoulliTermRow row;
  row.m = m;
  row.mode = mode;
  row.condition = condition;
  row.sign = total > 0.0 ? 1 : -1;
  row.log_abs_term = std::log(std::numbers::pi * (4.0 * m + 3.0)) -
                     (4.0 * m + 1.0) * std::log(2.0) + peak + std::log(std::fabs(total));
  return row;
}

}  // namespace serin::bernoulli
