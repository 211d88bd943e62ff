#include "sqba/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqba {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double SystemParams::sampling_probability() const {
  if (n == 0) return 0.0;
  return lambda / static_cast<double>(n);
}

std::string SystemParams::describe() const {
  std::ostringstream os;
  os << "n=" << n << " f=" << f << " epsilon=" << epsilon << " d=" << d << " lambda=" << lambda
     << " W=" << W << " B=" << B << " rho=" << rho;
  return os.str();
}

SystemParams derive_params(std::uint32_t n, double epsilon, double d) {
  if (n < 2) {
    throw ParamsError(ParamsErrorKind::ProcessCount, "n must be at least 2 (got " + std::to_string(n) + ")");
  }
  const double ln_n = std::log(static_cast<double>(n));
  const double eps_lo = 1.0 / (2.0 * ln_n);
  const double eps_hi = 1.0 / 3.0;
  if (!(epsilon > eps_lo && epsilon < eps_hi)) {
    throw ParamsError(ParamsErrorKind::EpsilonOutOfRange,
                      "EpsilonOutOfRange: require 1/(2 ln n) < epsilon < 1/3, i.e. " + fmt(eps_lo) +
                          " < epsilon < " + fmt(eps_hi) + " (got " + fmt(epsilon) + ")");
  }

  SystemParams p;
  p.n = n;
  p.epsilon = epsilon;
  p.d = d;
  p.lambda = 8.0 * ln_n;

  const double d_lo = std::max(1.0 / p.lambda, kMinSamplingSlack);
  const double d_hi = epsilon / 3.0 - 1.0 / (3.0 * p.lambda);
  if (!(d > d_lo && d < d_hi)) {
    throw ParamsError(ParamsErrorKind::DOutOfRange,
                      "DOutOfRange: require max{1/lambda, 0.0362} < d < epsilon/3 - 1/(3 lambda), i.e. " +
                          fmt(d_lo) + " < d < " + fmt(d_hi) + " (got " + fmt(d) + ")");
  }

  p.f = static_cast<std::uint32_t>(std::floor((1.0 / 3.0 - epsilon) * n));
  p.W = static_cast<std::uint32_t>(std::ceil((2.0 / 3.0 + 3.0 * d) * p.lambda));
  p.B = static_cast<std::uint32_t>(std::floor((1.0 / 3.0 - d) * p.lambda));
  p.rho = coin_success_rate(d);

  if (!(p.W > 2 * p.B) || !(p.rho > 0.0)) {
    throw ParamsError(ParamsErrorKind::Inconsistent, "derived constants violate W > 2B or rho > 0: " + p.describe());
  }
  if (p.W > n - p.f) {
    throw ParamsError(ParamsErrorKind::Inconsistent,
                      "W exceeds the n - f correct processes, no quorum can form: " + p.describe());
  }
  return p;
}

SystemParams custom_params(std::uint32_t n, std::uint32_t f, double lambda, std::uint32_t W, std::uint32_t B,
                           double d) {
  if (n < 2) {
    throw ParamsError(ParamsErrorKind::ProcessCount, "n must be at least 2 (got " + std::to_string(n) + ")");
  }
  if (!(lambda >= 0.0 && lambda <= n) || !(W > 2 * B) || W == 0 || f > n) {
    throw ParamsError(ParamsErrorKind::Inconsistent, "custom params need 0 <= lambda <= n, W > 2B, W >= 1, f <= n");
  }
  SystemParams p;
  p.n = n;
  p.f = f;
  p.epsilon = 1.0 / 3.0 - static_cast<double>(f) / n;
  p.d = d;
  p.lambda = lambda;
  p.W = W;
  p.B = B;
  p.rho = coin_success_rate(d);
  return p;
}

double coin_success_rate(double d) {
  const double num = 18.0 * d * d + 27.0 * d - 1.0;
  const double den = 3.0 * (5.0 + 6.0 * d) * (1.0 - d) * (1.0 + 9.0 * d);
  return num / den;
}

double common_value_bound(double d, double lambda) { return d * (11.0 - 3.0 * d) / (1.0 + 9.0 * d) * lambda; }

IntersectionMargins intersection_margins(const SystemParams& p) {
  const double cap = (1.0 + p.d) * p.lambda;
  return {2.0 * p.W - cap - p.B, static_cast<double>(p.W) + (p.B + 1.0) - cap};
}

double binomial_tail(std::uint32_t n, double p, std::uint32_t k, TailSide side) {
  if (k > n) return side == TailSide::Lower ? 1.0 : 0.0;
  if (p <= 0.0) return side == TailSide::Lower ? 1.0 : (k == 0 ? 1.0 : 0.0);
  if (p >= 1.0) return side == TailSide::Lower ? (k == n ? 1.0 : 0.0) : 1.0;

  const std::uint32_t lo = side == TailSide::Lower ? 0 : k;
  const std::uint32_t hi = side == TailSide::Lower ? k : n;
  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(-static_cast<long double>(p));
  const long double log_nf = std::lgamma(static_cast<long double>(n) + 1.0L);
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (std::uint32_t i = lo; i <= hi; ++i) {
    const long double log_term = log_nf - std::lgamma(static_cast<long double>(i) + 1.0L) -
                                 std::lgamma(static_cast<long double>(n - i) + 1.0L) + i * log_p + (n - i) * log_q;
    const long double y = std::exp(log_term) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

}  // namespace sqba
