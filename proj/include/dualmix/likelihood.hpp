#pragma once

#include "dualmix/borel.hpp"
#include "dualmix/cascade.hpp"
#include "dualmix/kernels.hpp"
#include "dualmix/optimize.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace dualmix {

/// Self-exciting process of one cascade. Reshare cascades carry no
/// background rate, so `mu` stays 0 in every fitting path.
struct HawkesParams {
  BranchingFactor n_star{0.0};
  KernelParams kernel;
  double mu = 0.0;
};

struct LikelihoodOptions {
  /// Only the latest `max_parents` predecessors enter each inner sum; 0 keeps
  /// the full history.
  std::size_t max_parents = 0;
};

/// mu + n* sum_{t_j < t} g(t - t_j). Events at exactly t are excluded.
double intensity(const HawkesParams& params, const Cascade& cascade, double t);

/// Point-process log-likelihood on [0, horizon): log-intensities of the events
/// after the seed minus the compensator, in closed form through kernel_tail.
/// Events at or after `horizon` are ignored. Returns kLogZero when an event
/// has zero intensity (n* = 0 with reshares present).
double full_log_likelihood(const HawkesParams& params, const Cascade& cascade,
                           double horizon, const LikelihoodOptions& options = {});

/// sum_{j >= 1} log sum_{z < j} g(t_j - t_z) for one cascade. Parents are
/// indexed, so tied timestamps contribute g(0).
double cascade_log_kernel_term(const KernelParams& kernel, const Cascade& cascade,
                               const LikelihoodOptions& options = {});

/// Same value as cascade_log_kernel_term plus its gradient with respect to
/// (log theta[, log c]).
double cascade_log_kernel_term(const KernelParams& kernel, const Cascade& cascade,
                               Eigen::VectorXd& gradient,
                               const LikelihoodOptions& options = {});

double log_likelihood_g(const KernelParams& kernel, std::span<const Cascade> group,
                        const LikelihoodOptions& options = {});

/// sum_i (N_i - 1) log n* - N_i n*.
double log_likelihood_n(BranchingFactor n_star, std::span<const std::int64_t> sizes);

enum class KernelSolver { kNelderMead, kQuasiNewton };

struct KernelFitOptions {
  KernelSolver solver = KernelSolver::kNelderMead;
  OptimizeOptions optimize{};
  LikelihoodOptions likelihood{};
};

struct KernelFit {
  KernelParams kernel;
  double objective = 0.0;
  int evaluations = 0;
};

/// Maximizes sum_i w_i cascade_log_kernel_term(kernel, cascade_i) over the
/// kernel box, starting from `start`. Never returns a worse objective than
/// the start point.
KernelFit fit_kernel_weighted(std::span<const Cascade> cascades,
                              std::span<const double> weights, const KernelParams& start,
                              const KernelFitOptions& options = {});

/// argmax of log_likelihood_g. Throws DataError when no cascade has two or
/// more events.
KernelFit fit_kernel_mle(std::span<const Cascade> cascades, KernelFamily family,
                         const KernelFitOptions& options = {});

/// Kernel-box bounds in (log theta[, log c]) coordinates.
Box kernel_log_box(KernelFamily family);
Eigen::VectorXd kernel_to_log_params(const KernelParams& kernel);
KernelParams kernel_from_log_params(KernelFamily family, const Eigen::VectorXd& x);

struct SeparabilityReport {
  BranchingFactor joint_n_star{0.0};
  KernelParams joint_kernel;
  double joint_log_likelihood = 0.0;
  BranchingFactor separated_n_star{0.0};
  KernelParams separated_kernel;
  double separated_log_likelihood = 0.0;
  double n_star_gap = 0.0;
  double theta_gap = 0.0;
  double c_gap = 0.0;
  bool kernel_identifiable = true;
};

/// Compares a direct joint maximization of the summed point-process
/// likelihood (each cascade observed until its last event plus the
/// completion horizon) against the closed-form size estimate paired with the
/// kernel-only maximizer. Diagnostic only.
SeparabilityReport check_separability(std::span<const Cascade> cascades,
                                      KernelFamily family,
                                      const KernelFitOptions& options = {});

}  // namespace dualmix
