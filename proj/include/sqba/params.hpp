#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sqba {

// Lower bound on the sampling slack d used by the committee analysis.
inline constexpr double kMinSamplingSlack = 0.0362;

/// All protocol constants derived from (n, epsilon, d).
///
/// lambda stays real-valued; only the thresholds W and B are rounded.
/// Committee membership probability is exactly lambda / n.
struct SystemParams {
  std::uint32_t n = 0;        // process count
  std::uint32_t f = 0;        // Byzantine budget, floor((1/3 - eps) n)
  double epsilon = 0.0;       // resilience slack
  double d = 0.0;             // sampling slack
  double lambda = 0.0;        // expected committee size, 8 ln n
  std::uint32_t W = 0;        // wait threshold, ceil((2/3 + 3d) lambda)
  std::uint32_t B = 0;        // Byzantine committee bound, floor((1/3 - d) lambda)
  double rho = 0.0;           // coin success-rate lower bound

  double sampling_probability() const;
  std::string describe() const;
};

enum class ParamsErrorKind { ProcessCount, EpsilonOutOfRange, DOutOfRange, Inconsistent };

class ParamsError : public std::invalid_argument {
 public:
  ParamsError(ParamsErrorKind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}
  ParamsErrorKind kind() const noexcept { return kind_; }

 private:
  ParamsErrorKind kind_;
};

/// Derives and validates the full constant chain. Throws ParamsError naming the
/// first violated inequality and its endpoints. Also rejects W > n - f, which
/// only happens for tiny n where lambda exceeds n.
SystemParams derive_params(std::uint32_t n, double epsilon, double d);

/// Builds params from explicit thresholds without the asymptotic constraint
/// checks. Used for hand-traceable small instances (e.g. lambda = n, W = 3, B = 0).
/// Still enforces W > 2B and lambda in [0, n].
SystemParams custom_params(std::uint32_t n, std::uint32_t f, double lambda, std::uint32_t W,
                           std::uint32_t B, double d = 0.05);

/// rho(d) = (18d^2 + 27d - 1) / (3 (5 + 6d)(1 - d)(1 + 9d)).
double coin_success_rate(double d);

/// Lower bound on the number of common values: d(11 - 3d)/(1 + 9d) * lambda.
double common_value_bound(double d, double lambda);

struct IntersectionMargins {
  double s5 = 0.0;  // 2W - (1+d) lambda - B
  double s6 = 0.0;  // W + (B+1) - (1+d) lambda
};

IntersectionMargins intersection_margins(const SystemParams& p);

enum class TailSide { Lower, Upper };

/// Exact P[Bin(n,p) <= k] (Lower) or P[Bin(n,p) >= k] (Upper).
double binomial_tail(std::uint32_t n, double p, std::uint32_t k, TailSide side);

}  // namespace sqba
