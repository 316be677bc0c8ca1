#include "dualmix/borel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualmix {

BranchingFactor::BranchingFactor(double n_star) : value_(n_star) {
  if (!(n_star >= 0.0 && n_star < 1.0)) {
    throw std::invalid_argument("branching factor must lie in [0, 1)");
  }
}

double borel_log_pmf(BranchingFactor n_star, std::int64_t k) {
  if (k < 1) throw std::domain_error("Borel support starts at 1");
  return borel_tanner_log_pmf(n_star, 1, k);
}

Moments borel_mean_var(BranchingFactor n_star) {
  return borel_tanner_mean_var(n_star, 1.0);
}

double borel_tanner_log_pmf(BranchingFactor n_star, std::int64_t n_initial,
                            std::int64_t k) {
  if (n_initial < 0) throw std::domain_error("negative number of initial events");
  if (k < n_initial) throw std::domain_error("progeny smaller than initial events");
  if (n_initial == 0) return k == 0 ? 0.0 : kLogZero;

  const double n = n_star.value();
  const double kd = static_cast<double>(k);
  const double extra = static_cast<double>(k - n_initial);
  double log_power = 0.0;
  if (extra > 0.0) {
    if (n == 0.0) return kLogZero;
    log_power = extra * std::log(kd * n);
  }
  return std::log(static_cast<double>(n_initial)) + log_power - kd * n -
         std::log(kd) - std::lgamma(extra + 1.0);
}

Moments borel_tanner_mean_var(BranchingFactor n_star, double n_initial) {
  const double n = n_star.value();
  const double gap = 1.0 - n;
  return {n_initial / gap, n_initial * n / (gap * gap * gap)};
}

double poisson_log_pmf(std::int64_t z, double rate) {
  if (z < 0) return kLogZero;
  if (rate == 0.0) return z == 0 ? 0.0 : kLogZero;
  const double zd = static_cast<double>(z);
  return zd * std::log(rate) - rate - std::lgamma(zd + 1.0);
}

BranchingFactor fit_borel_mle(std::span<const std::int64_t> sizes) {
  if (sizes.empty()) throw std::invalid_argument("no cascade sizes to fit");
  double offspring = 0.0;
  double events = 0.0;
  for (auto n : sizes) {
    if (n < 1) throw std::invalid_argument("cascade sizes must be >= 1");
    offspring += static_cast<double>(n - 1);
    events += static_cast<double>(n);
  }
  return BranchingFactor(std::min(offspring / events, kMaxBranching));
}

}  // namespace dualmix
