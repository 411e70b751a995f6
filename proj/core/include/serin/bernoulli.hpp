#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace serin::bernoulli {

using rational = boost::multiprecision::cpp_rational;

/// The inner alternating sum cancelled below the working precision; the
/// would-be result carries no correct digits.
class precision_loss_error : public std::runtime_error {
 public:
  precision_loss_error(unsigned m, double condition)
      : std::runtime_error("catastrophic cancellation at m=" + std::to_string(m)),
        m_(m),
        condition_(condition) {}
  unsigned m() const noexcept { return m_; }
  double condition() const noexcept { return condition_; }

 private:
  unsigned m_;
  double condition_;
};

/// Exact B_n from the generating-function recurrence
/// sum_{k=0}^{n} C(n+1,k) B_k = 0, B_0 = 1 (so B_1 = -1/2, odd B_n = 0 beyond).
/// Values are cached; thread-safe.
const rational& bernoulli_exact(unsigned n);

/// bernoulli_exact(n) as a double; throws std::overflow_error when |B_n|
/// exceeds the double range.
double bernoulli_double(unsigned n);

/// ln|B_n| from the exact rational; n must be even >= 2 (or 1).
double log_abs_bernoulli_exact(unsigned n);

/// ln|B_{2m}| from the large-m form ln(4 sqrt(pi m)) + 2m ln(m/(pi e)).
double log_abs_bernoulli_asymptotic(unsigned m);

/// B_{2m} through the zeta route (-1)^(m-1) 2 (2m)! / (2 pi)^{2m} zeta(2m),
/// evaluated in extended precision. The independent cross-check for
/// bernoulli_exact.
double bernoulli_zeta_route(unsigned two_m);

/// zeta(s) for real s > 1, by convergence acceleration of the alternating
/// Dirichlet eta series.
double zeta(double s);

enum class ProbeSeries { s1, s2 };
enum class TermMode { exact, stirling };

struct BernoulliTermRow {
  unsigned m = 0;
  double log_abs_term = 0.0;
  int sign = 0;
  TermMode mode = TermMode::exact;
  double condition = 0.0;  // max inner summand / |inner sum|
};

/// Default ceiling on the cancellation monitor: beyond this the inner
/// alternating sum has lost all double-precision digits.
constexpr double kConditionLimit = 1e12;

/// log|a_m| of the two Riemann-equivalent Bernoulli-number series, computed
/// in the log domain: binomial weights through lgamma, the alternating inner
/// sum through signed log-sum-exp. `exact` mode draws ln|B| from the exact
/// rationals, `stirling` mode from the asymptotic form. Throws
/// precision_loss_error once cancellation exceeds `condition_limit`.
BernoulliTermRow series_term(ProbeSeries series, unsigned m, TermMode mode,
                             double condition_limit = kConditionLimit);

std::string_view to_string(ProbeSeries s);
std::string_view to_string(TermMode m);

}  // namespace serin::bernoulli
