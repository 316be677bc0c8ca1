#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace dualmix {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Largest admissible branching factor; the size laws diverge at 1.
inline constexpr double kMaxBranching = 1.0 - 1e-9;

/// Expected number of direct offspring per event, in [0, 1).
class BranchingFactor {
 public:
  /// Throws std::invalid_argument outside [0, 1).
  explicit BranchingFactor(double n_star);

  double value() const noexcept { return value_; }
  bool operator==(const BranchingFactor&) const = default;
  auto operator<=>(const BranchingFactor&) const = default;

 private:
  double value_;
};

struct Moments {
  double mean;
  double variance;
};

/// log of (k n)^(k-1) e^(-k n) / k!, total progeny of one seed.
double borel_log_pmf(BranchingFactor n_star, std::int64_t k);
Moments borel_mean_var(BranchingFactor n_star);

/// log of z (k n)^(k-z) e^(-k n) / (k (k-z)!), total progeny of z initial
/// events (the initial events included). PMF(0 | n, 0) = 1.
double borel_tanner_log_pmf(BranchingFactor n_star, std::int64_t n_initial,
                            std::int64_t k);
Moments borel_tanner_mean_var(BranchingFactor n_star, double n_initial);

double poisson_log_pmf(std::int64_t z, double rate);

/// Closed-form maximizer of the size likelihood: sum(N - 1) / sum(N).
BranchingFactor fit_borel_mle(std::span<const std::int64_t> sizes);

}  // namespace dualmix
