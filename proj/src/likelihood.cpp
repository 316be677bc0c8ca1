#include "dualmix/likelihood.hpp"

#include "dualmix/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dualmix {

namespace {

// log(exp(a) + 1)
double log1p_exp(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double sigmoid(double a) {
  if (a == -std::numeric_limits<double>::infinity()) return 0.0;
  return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

// Linear-time recursion for the exponential kernel with full history:
//   A_j = exp(-theta d_j) (A_{j-1} + 1),  R_j = d_j + R_{j-1} A_{j-1} / (A_{j-1} + 1)
// where A_j = sum_{z<j} exp(-theta (t_j - t_z)) and R_j is the A-weighted mean lag.
double exponential_term(double theta, std::span<const double> t, double* grad) {
  const double log_theta = std::log(theta);
  double log_a = -std::numeric_limits<double>::infinity();
  double mean_lag = 0.0;
  double value = 0.0;
  double g = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const double d = t[j] - t[j - 1];
    mean_lag = d + mean_lag * sigmoid(log_a);
    log_a = -theta * d + log1p_exp(log_a);
    value += log_theta + log_a;
    g += 1.0 - theta * mean_lag;
  }
  if (grad) grad[0] = g;
  return value;
}

// Quadratic path. log g decreases with the lag in both families, so the
// nearest parent carries the largest term and serves as the log-sum-exp pivot.
double direct_term(const KernelParams& k, std::span<const double> t, std::size_t window,
                   double* grad) {
  const bool power_law = k.family == KernelFamily::kPowerLaw;
  const double theta = k.theta;
  const double log_theta = std::log(theta);
  const double log_c = power_law ? std::log(k.c) : 0.0;
  const double inv_c = power_law ? 1.0 / k.c : 0.0;
  double value = 0.0;
  double g0 = 0.0;
  double g1 = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) {
    const std::size_t first = (window == 0 || j <= window) ? 0 : j - window;
    // shape(tau) is log g(tau) without the constant part
    const auto shape = [&](double tau) {
      return power_law ? -(1.0 + theta) * std::log1p(tau * inv_c) : -theta * tau;
    };
    const double peak = shape(t[j] - t[j - 1]);
    double total = 0.0;
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t z = first; z < j; ++z) {
      const double tau = t[j] - t[z];
      const double e = std::exp(shape(tau) - peak);
      total += e;
      if (grad) {
        if (power_law) {
          s0 += e * std::log1p(tau * inv_c);
          s1 += e * k.c / (tau + k.c);
        } else {
          s0 += e * tau;
        }
      }
    }
    value += log_theta - log_c + peak + std::log(total);
    if (grad) {
      if (power_law) {
        g0 += 1.0 - theta * s0 / total;
        g1 += theta - (1.0 + theta) * s1 / total;
      } else {
        g0 += 1.0 - theta * s0 / total;
      }
    }
  }
  if (grad) {
    grad[0] = g0;
    if (power_law) grad[1] = g1;
  }
  return value;
}

double kernel_term(const KernelParams& k, std::span<const double> t,
                   const LikelihoodOptions& options, double* grad) {
  if (k.family == KernelFamily::kExponential &&
      (options.max_parents == 0 || options.max_parents + 1 >= t.size())) {
    return exponential_term(k.theta, t, grad);
  }
  return direct_term(k, t, options.max_parents, grad);
}

std::span<const double> events_before(const Cascade& cascade, double horizon) {
  const auto times = cascade.times();
  const auto end = std::lower_bound(times.begin(), times.end(), horizon);
  return times.first(static_cast<std::size_t>(end - times.begin()));
}

}  // namespace

double intensity(const HawkesParams& params, const Cascade& cascade, double t) {
  double sum = 0.0;
  for (double tj : cascade.times()) {
    if (tj >= t) break;
    sum += kernel_pdf(params.kernel, t - tj);
  }
  return params.mu + params.n_star.value() * sum;
}

double full_log_likelihood(const HawkesParams& params, const Cascade& cascade,
                           double horizon, const LikelihoodOptions& options) {
  if (!(horizon > 0.0)) throw std::invalid_argument("invalid horizon: must be > 0");
  const auto t = events_before(cascade, horizon);
  const double n = params.n_star.value();
  double compensator = 0.0;
  for (double tj : t) compensator -= std::expm1(kernel_log_tail(params.kernel, horizon - tj));
  compensator *= n;

  const double offspring = static_cast<double>(t.size()) - 1.0;
  if (offspring == 0.0) return -compensator;
  if (n == 0.0) return kLogZero;
  return offspring * std::log(n) + kernel_term(params.kernel, t, options, nullptr) -
         compensator;
}

double cascade_log_kernel_term(const KernelParams& kernel, const Cascade& cascade,
                               const LikelihoodOptions& options) {
  return kernel_term(kernel, cascade.times(), options, nullptr);
}

double cascade_log_kernel_term(const KernelParams& kernel, const Cascade& cascade,
                               Eigen::VectorXd& gradient,
                               const LikelihoodOptions& options) {
  gradient.setZero(num_kernel_params(kernel.family));
  return kernel_term(kernel, cascade.times(), options, gradient.data());
}

double log_likelihood_g(const KernelParams& kernel, std::span<const Cascade> group,
                        const LikelihoodOptions& options) {
  double total = 0.0;
  for (const auto& c : group) total += cascade_log_kernel_term(kernel, c, options);
  return total;
}

double log_likelihood_n(BranchingFactor n_star, std::span<const std::int64_t> sizes) {
  const double n = n_star.value();
  double total = 0.0;
  for (auto size : sizes) {
    const double offspring = static_cast<double>(size - 1);
    if (offspring > 0.0) {
      if (n == 0.0) return kLogZero;
      total += offspring * std::log(n);
    }
    total -= static_cast<double>(size) * n;
  }
  return total;
}

Box kernel_log_box(KernelFamily family) {
  if (family == KernelFamily::kExponential) {
    return {Eigen::VectorXd::Constant(1, std::log(kThetaMin)),
            Eigen::VectorXd::Constant(1, std::log(kThetaMax))};
  }
  Eigen::VectorXd lower(2), upper(2);
  lower << std::log(kThetaMin), std::log(kCutoffMin);
  upper << std::log(kThetaMax), std::log(kCutoffMax);
  return {lower, upper};
}

Eigen::VectorXd kernel_to_log_params(const KernelParams& kernel) {
  if (kernel.family == KernelFamily::kExponential) {
    return Eigen::VectorXd::Constant(1, std::log(kernel.theta));
  }
  Eigen::VectorXd x(2);
  x << std::log(kernel.theta), std::log(kernel.c);
  return x;
}

KernelParams kernel_from_log_params(KernelFamily family, const Eigen::VectorXd& x) {
  if (family == KernelFamily::kExponential) {
    return KernelParams{family, std::exp(x[0]), 0.0};
  }
  return KernelParams{family, std::exp(x[0]), std::exp(x[1])};
}

KernelFit fit_kernel_weighted(std::span<const Cascade> cascades,
                              std::span<const double> weights, const KernelParams& start,
                              const KernelFitOptions& options) {
  if (weights.size() != cascades.size()) {
    throw std::invalid_argument("one weight per cascade required");
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    if (weights[i] > 0.0 && cascades[i].size() > 1) active.push_back(i);
  }
  const KernelFamily family = start.family;
  const Box box = kernel_log_box(family);
  const Eigen::VectorXd x0 = box.project(kernel_to_log_params(start));

  OptimizeResult result;
  if (options.solver == KernelSolver::kNelderMead) {
    auto objective = [&](const Eigen::VectorXd& x) {
      const KernelParams k = kernel_from_log_params(family, x);
      double total = 0.0;
      for (auto i : active) {
        total += weights[i] * kernel_term(k, cascades[i].times(), options.likelihood, nullptr);
      }
      return total;
    };
    result = maximize_nelder_mead(objective, x0, box, options.optimize);
  } else {
    auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      const KernelParams k = kernel_from_log_params(family, x);
      grad.setZero(x.size());
      double g[2];
      double total = 0.0;
      for (auto i : active) {
        total += weights[i] * kernel_term(k, cascades[i].times(), options.likelihood, g);
        for (Eigen::Index d = 0; d < x.size(); ++d) grad[d] += weights[i] * g[d];
      }
      return total;
    };
    result = maximize_bfgs(objective, x0, box, options.optimize);
  }
  return {kernel_from_log_params(family, result.x), result.value, result.evaluations};
}

namespace {

KernelParams moment_start(std::span<const Cascade> cascades, KernelFamily family) {
  double gaps = 0.0;
  double count = 0.0;
  for (const auto& c : cascades) {
    const auto t = c.times();
    for (std::size_t j = 1; j < t.size(); ++j) {
      gaps += t[j] - t[j - 1];
      count += 1.0;
    }
  }
  const double mean_gap = std::clamp(count > 0.0 ? gaps / count : 1.0, 1e-3, 1e5);
  if (family == KernelFamily::kExponential) return KernelParams{family, 1.0 / mean_gap, 0.0};
  return KernelParams{family, 1.0, mean_gap};
}

}  // namespace

KernelFit fit_kernel_mle(std::span<const Cascade> cascades, KernelFamily family,
                         const KernelFitOptions& options) {
  const bool informative = std::any_of(cascades.begin(), cascades.end(),
                                       [](const Cascade& c) { return c.size() > 1; });
  if (!informative) {
    throw DataError("kernel fit needs at least one cascade with two or more events");
  }
  const std::vector<double> ones(cascades.size(), 1.0);
  KernelFit fit = fit_kernel_weighted(cascades, ones, moment_start(cascades, family), options);
  // Restarting the simplex around the optimum removes premature collapse.
  for (int polish = 0; polish < 2; ++polish) {
    KernelFit again = fit_kernel_weighted(cascades, ones, fit.kernel, options);
    again.evaluations += fit.evaluations;
    if (again.objective >= fit.objective) fit = again;
  }
  return fit;
}

SeparabilityReport check_separability(std::span<const Cascade> cascades,
                                      KernelFamily family,
                                      const KernelFitOptions& options) {
  if (cascades.empty()) throw std::invalid_argument("no cascades to compare");
  SeparabilityReport report;
  const auto sizes = cascade_sizes(cascades);
  report.separated_n_star = fit_borel_mle(sizes);
  report.kernel_identifiable = std::any_of(
      sizes.begin(), sizes.end(), [](std::int64_t n) { return n > 1; });

  KernelFitOptions fit_options = options;
  fit_options.optimize.max_evaluations = std::max(fit_options.optimize.max_evaluations, 4000);
  report.separated_kernel = report.kernel_identifiable
                                ? fit_kernel_mle(cascades, family, fit_options).kernel
                                : moment_start(cascades, family);

  std::vector<double> horizons;
  for (const auto& c : cascades) {
    horizons.push_back(c.observed_until().value_or(c.last_time() + kCompletionHorizon));
  }
  auto joint_value = [&](double n_star, const KernelParams& kernel) {
    const HawkesParams p{BranchingFactor(n_star), kernel, 0.0};
    double total = 0.0;
    for (std::size_t i = 0; i < cascades.size(); ++i) {
      total += full_log_likelihood(p, cascades[i], horizons[i], options.likelihood);
    }
    return total;
  };

  // Joint coordinates: (n*, log theta[, log c]).
  const Box kbox = kernel_log_box(family);
  const Eigen::Index dim = kbox.lower.size() + 1;
  Box box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  box.lower << 0.0, kbox.lower;
  box.upper << kMaxBranching, kbox.upper;
  Eigen::VectorXd x0(dim);
  x0 << 0.5, kernel_to_log_params(moment_start(cascades, family));

  auto objective = [&](const Eigen::VectorXd& x) {
    return joint_value(x[0], kernel_from_log_params(family, x.tail(dim - 1)));
  };
  OptimizeOptions joint_options = fit_options.optimize;
  joint_options.initial_step = 0.1;
  OptimizeResult best = maximize_nelder_mead(objective, x0, box, joint_options);
  for (int polish = 0; polish < 3; ++polish) {
    OptimizeResult again = maximize_nelder_mead(objective, best.x, box, joint_options);
    if (again.value >= best.value) best = again;
  }

  report.joint_n_star = BranchingFactor(best.x[0]);
  report.joint_kernel = kernel_from_log_params(family, best.x.tail(dim - 1));
  report.joint_log_likelihood = best.value;
  report.separated_log_likelihood =
      joint_value(report.separated_n_star.value(), report.separated_kernel);
  report.n_star_gap = std::abs(report.joint_n_star.value() - report.separated_n_star.value());
  report.theta_gap = std::abs(report.joint_kernel.theta - report.separated_kernel.theta);
  report.c_gap = std::abs(report.joint_kernel.c - report.separated_kernel.c);
  return report;
}

}  // namespace dualmix
