#include "dualmix/mixtures.hpp"

#include "dualmix/characterize.hpp"
#include "dualmix/errors.hpp"
#include "dualmix/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dualmix {

namespace {

constexpr double kWeightSumTolerance = 1e-9;
// Lowest starting n*; a component started at exactly 0 can never leave it.
constexpr double kMinInitialBranching = 1e-3;

template <typename Components>
void check_weights(const Components& components, const char* what) {
  if (components.empty()) throw std::invalid_argument(std::string(what) + " has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument(std::string(what) + " has a negative weight");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument(std::string(what) + " weights do not sum to 1");
  }
}

void check_k(int k, const EmConfig& config) {
  if (k < 1 || k > config.max_components) {
    throw std::invalid_argument("component count must lie in [1, " +
                                std::to_string(config.max_components) + "]");
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double peak = v.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((v.array() - peak).exp().sum());
}

// E-step shared by both mixtures: log_joint(i, k) = log p_k + log f_k(x_i).
// Fills normalized memberships and returns sum_i multiplicity_i * log
// sum_k exp(log_joint(i, k)).
double e_step(const Eigen::MatrixXd& log_joint, std::span<const double> multiplicity,
              Eigen::MatrixXd& membership) {
  membership.resize(log_joint.rows(), log_joint.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < log_joint.rows(); ++i) {
    const double lse = log_sum_exp(log_joint.row(i));
    if (!std::isfinite(lse)) {
      throw NumericalError("observation has zero likelihood under every component");
    }
    membership.row(i) = (log_joint.row(i).array() - lse).exp();
    membership.row(i) /= membership.row(i).sum();
    total += multiplicity[static_cast<std::size_t>(i)] * lse;
  }
  return total;
}

// Weight update with frozen components. A component whose new weight drops
// below the collapse threshold keeps its current weight and parameters; the
// others share the remaining mass in proportion to their responsibilities.
void update_weights(const Eigen::VectorXd& responsibility, double total,
                    double collapse_weight, std::vector<double>& weights,
                    std::vector<bool>& frozen, bool& collapsed) {
  const auto k = weights.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (!frozen[j] && responsibility[static_cast<Eigen::Index>(j)] / total < collapse_weight) {
      frozen[j] = true;
      collapsed = true;
    }
  }
  double frozen_mass = 0.0;
  double free_resp = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (frozen[j]) {
      frozen_mass += weights[j];
    } else {
      free_resp += responsibility[static_cast<Eigen::Index>(j)];
    }
  }
  if (free_resp <= 0.0) return;
  for (std::size_t j = 0; j < k; ++j) {
    if (!frozen[j]) {
      weights[j] = (1.0 - frozen_mass) * responsibility[static_cast<Eigen::Index>(j)] / free_resp;
    }
  }
}

bool converged(double previous, double current, double tolerance) {
  return std::abs(current - previous) <= tolerance * std::abs(previous);
}

std::vector<std::size_t> order_by(const std::vector<double>& keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

Eigen::MatrixXd permute_columns(const Eigen::MatrixXd& m, const std::vector<std::size_t>& order) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t j = 0; j < order.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = m.col(static_cast<Eigen::Index>(order[j]));
  }
  return out;
}

struct BmmRun {
  std::vector<double> n_star;
  std::vector<double> weights;
  FitReport report;
  Eigen::MatrixXd membership;
};

BmmRun run_bmm(const SizeCounts& data, std::vector<double> n_star, const EmConfig& config) {
  const auto k = n_star.size();
  const auto rows = static_cast<Eigen::Index>(data.sizes.size());
  const double total = data.total();
  BmmRun run;
  run.weights.assign(k, 1.0 / static_cast<double>(k));
  std::vector<bool> frozen(k, false);
  Eigen::MatrixXd log_joint(rows, static_cast<Eigen::Index>(k));

  for (int iteration = 0;; ++iteration) {
    for (std::size_t j = 0; j < k; ++j) {
      const BranchingFactor b(n_star[j]);
      const double log_w = run.weights[j] > 0.0 ? std::log(run.weights[j]) : kLogZero;
      for (Eigen::Index i = 0; i < rows; ++i) {
        log_joint(i, static_cast<Eigen::Index>(j)) =
            log_w + borel_log_pmf(b, data.sizes[static_cast<std::size_t>(i)]);
      }
    }
    const double ll = e_step(log_joint, data.counts, run.membership);
    const bool done = !run.report.log_likelihood_trace.empty() &&
                      converged(run.report.log_likelihood_trace.back(), ll, config.tolerance);
    run.report.log_likelihood_trace.push_back(ll);
    run.report.final_log_likelihood = ll;
    run.report.iterations = iteration;
    if (done) {
      run.report.converged = true;
      break;
    }
    if (iteration == config.bmm_max_iterations) break;

    Eigen::VectorXd responsibility = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
      double offspring = 0.0;
      double events = 0.0;
      double resp = 0.0;
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double w = data.counts[static_cast<std::size_t>(i)] *
                         run.membership(i, static_cast<Eigen::Index>(j));
        const auto size = static_cast<double>(data.sizes[static_cast<std::size_t>(i)]);
        resp += w;
        offspring += w * (size - 1.0);
        events += w * size;
      }
      responsibility[static_cast<Eigen::Index>(j)] = resp;
      if (!frozen[j] && resp / total >= config.collapse_weight && events > 0.0) {
        n_star[j] = std::min(offspring / events, kMaxBranching);
      }
    }
    update_weights(responsibility, total, config.collapse_weight, run.weights, frozen,
                   run.report.collapsed);
  }
  run.n_star = std::move(n_star);
  return run;
}

std::vector<double> bmm_start(const SizeCounts& data, int k, int restart, Rng& rng) {
  std::vector<WeightedSample> naive;
  for (std::size_t i = 0; i < data.sizes.size(); ++i) {
    const auto n = static_cast<double>(data.sizes[i]);
    naive.push_back({(n - 1.0) / n, data.counts[i]});
  }
  std::vector<double> levels(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    levels[static_cast<std::size_t>(j)] =
        restart == 0 ? (j + 0.5) / k : std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
  std::sort(levels.begin(), levels.end());
  auto start = weighted_quantiles(naive, levels);
  for (std::size_t j = 0; j < start.size(); ++j) {
    double v = std::max(start[j], kMinInitialBranching);
    if (restart > 0) v *= std::exp(std::uniform_real_distribution<double>(-0.1, 0.1)(rng));
    if (j > 0) v = std::max(v, start[j - 1] + kMinInitialBranching);
    start[j] = std::min(v, 0.999);
  }
  return start;
}

}  // namespace

void validate(const BorelMixture& mixture) { check_weights(mixture.components, "Borel mixture"); }

void validate(const KernelMixture& mixture) {
  check_weights(mixture.components, "kernel mixture");
  for (const auto& c : mixture.components) {
    validate(c.kernel);
    if (c.kernel.family != mixture.family()) {
      throw std::invalid_argument("kernel mixture mixes kernel families");
    }
  }
}

double SizeCounts::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

SizeCounts compress_sizes(std::span<const std::int64_t> sizes) {
  std::map<std::int64_t, double> tally;
  for (auto n : sizes) {
    if (n < 1) throw std::invalid_argument("cascade sizes must be >= 1");
    tally[n] += 1.0;
  }
  SizeCounts out;
  for (const auto& [size, count] : tally) {
    out.sizes.push_back(size);
    out.counts.push_back(count);
  }
  return out;
}

BmmFit fit_bmm(const SizeCounts& counts, int k, const EmConfig& config) {
  check_k(k, config);
  if (counts.sizes.empty()) throw std::invalid_argument("no cascade sizes to fit");
  Rng rng = make_stream(config.seed, 0);
  const int restarts = k == 1 ? 1 : std::max(config.restarts, 1);

  BmmRun best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    BmmRun run = run_bmm(counts, bmm_start(counts, k, r, rng), config);
    if (!have_best || run.report.final_log_likelihood > best.report.final_log_likelihood) {
      best = std::move(run);
      have_best = true;
    }
  }

  const auto order = order_by(best.n_star);
  BmmFit fit;
  for (auto j : order) fit.mixture.components.push_back({BranchingFactor(best.n_star[j]), best.weights[j]});
  fit.report = std::move(best.report);
  fit.report.restarts = restarts;
  fit.report.over_parameterized = static_cast<std::size_t>(k) > counts.sizes.size();
  if (config.keep_membership) fit.report.membership = permute_columns(best.membership, order);
  return fit;
}

BmmFit fit_bmm(std::span<const std::int64_t> sizes, int k, const EmConfig& config) {
  const SizeCounts counts = compress_sizes(sizes);
  BmmFit fit = fit_bmm(counts, k, config);
  if (fit.report.membership) {
    const Eigen::MatrixXd& compressed = *fit.report.membership;
    Eigen::MatrixXd expanded(static_cast<Eigen::Index>(sizes.size()), compressed.cols());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto row = std::lower_bound(counts.sizes.begin(), counts.sizes.end(), sizes[i]) -
                       counts.sizes.begin();
      expanded.row(static_cast<Eigen::Index>(i)) = compressed.row(row);
    }
    fit.report.membership = std::move(expanded);
  }
  return fit;
}

double bmm_log_likelihood(const BorelMixture& mixture, const SizeCounts& counts) {
  double total = 0.0;
  Eigen::RowVectorXd terms(static_cast<Eigen::Index>(mixture.components.size()));
  for (std::size_t i = 0; i < counts.sizes.size(); ++i) {
    for (std::size_t j = 0; j < mixture.components.size(); ++j) {
      const auto& c = mixture.components[j];
      terms[static_cast<Eigen::Index>(j)] =
          (c.weight > 0.0 ? std::log(c.weight) : kLogZero) + borel_log_pmf(c.n_star, counts.sizes[i]);
    }
    total += counts.counts[i] * log_sum_exp(terms);
  }
  return total;
}

double kmm_log_likelihood(const KernelMixture& mixture, std::span<const Cascade> cascades,
                          const LikelihoodOptions& options) {
  double total = 0.0;
  Eigen::RowVectorXd terms(static_cast<Eigen::Index>(mixture.components.size()));
  for (const auto& cascade : cascades) {
    if (cascade.size() < 2) continue;
    for (std::size_t j = 0; j < mixture.components.size(); ++j) {
      const auto& c = mixture.components[j];
      terms[static_cast<Eigen::Index>(j)] = (c.weight > 0.0 ? std::log(c.weight) : kLogZero) +
                                            cascade_log_kernel_term(c.kernel, cascade, options);
    }
    total += log_sum_exp(terms);
  }
  return total;
}

namespace {

struct KmmRun {
  std::vector<KernelParams> kernels;
  std::vector<double> weights;
  std::vector<bool> frozen;
  /// Initial simplex size for each component's next M-step, in log-params.
  std::vector<double> steps;
  FitReport report;
  Eigen::MatrixXd membership;
};

KmmRun start_kmm(std::vector<KernelParams> kernels) {
  KmmRun run;
  const auto k = kernels.size();
  run.kernels = std::move(kernels);
  run.weights.assign(k, 1.0 / static_cast<double>(k));
  run.frozen.assign(k, false);
  run.steps.assign(k, KernelFitOptions{}.optimize.initial_step);
  return run;
}

// Advances `run` until convergence or until it has recorded `max_iterations`
// M-steps in total. Resuming a paused run repeats its last E-step without
// logging it again.
void run_kmm(std::span<const Cascade> data, KmmRun& run, int max_iterations,
             const EmConfig& config) {
  const auto k = run.kernels.size();
  const auto rows = static_cast<Eigen::Index>(data.size());
  const std::vector<double> ones(data.size(), 1.0);
  Eigen::MatrixXd log_joint(rows, static_cast<Eigen::Index>(k));
  std::vector<double> column(data.size());
  const bool resumed = !run.report.log_likelihood_trace.empty();

  for (bool first = true;; first = false) {
    for (std::size_t j = 0; j < k; ++j) {
      const double log_w = run.weights[j] > 0.0 ? std::log(run.weights[j]) : kLogZero;
      for (Eigen::Index i = 0; i < rows; ++i) {
        log_joint(i, static_cast<Eigen::Index>(j)) =
            log_w + cascade_log_kernel_term(run.kernels[j], data[static_cast<std::size_t>(i)],
                                            config.kernel_fit.likelihood);
      }
    }
    const double ll = e_step(log_joint, ones, run.membership);
    if (!(first && resumed)) {
      const bool done = !run.report.log_likelihood_trace.empty() &&
                        converged(run.report.log_likelihood_trace.back(), ll, config.tolerance);
      run.report.log_likelihood_trace.push_back(ll);
      run.report.final_log_likelihood = ll;
      if (done) {
        run.report.converged = true;
        return;
      }
    }
    if (run.report.iterations >= max_iterations) return;

    const Eigen::VectorXd responsibility = run.membership.colwise().sum().transpose();
    for (std::size_t j = 0; j < k; ++j) {
      if (run.frozen[j] ||
          responsibility[static_cast<Eigen::Index>(j)] / static_cast<double>(rows) <
              config.collapse_weight) {
        continue;
      }
      for (Eigen::Index i = 0; i < rows; ++i) {
        column[static_cast<std::size_t>(i)] = run.membership(i, static_cast<Eigen::Index>(j));
      }
      // Late in EM the parameters barely move; a simplex sized to the last
      // move saves most of the shrinking evaluations.
      KernelFitOptions options = config.kernel_fit;
      options.optimize.initial_step = std::min(run.steps[j], config.kernel_fit.optimize.initial_step);
      const KernelParams next = fit_kernel_weighted(data, column, run.kernels[j], options).kernel;
      const double moved =
          (kernel_to_log_params(next) - kernel_to_log_params(run.kernels[j])).lpNorm<Eigen::Infinity>();
      run.steps[j] = std::clamp(2.0 * moved, 1e-5, config.kernel_fit.optimize.initial_step);
      run.kernels[j] = next;
    }
    update_weights(responsibility, static_cast<double>(rows), config.collapse_weight,
                   run.weights, run.frozen, run.report.collapsed);
    ++run.report.iterations;
  }
}

// Restarts are screened with this many EM iterations; only the best one is
// run to convergence.
constexpr int kKmmScreeningIterations = 10;

}  // namespace

KmmFit fit_kmm(std::span<const Cascade> cascades, int k, KernelFamily family,
               const EmConfig& config) {
  check_k(k, config);
  std::vector<Cascade> data;
  for (const auto& c : cascades) {
    if (c.size() > 1) data.push_back(c);
  }
  if (data.empty()) {
    throw DataError("insufficient data: kernel mixture needs a cascade with two or more events");
  }

  KernelFitOptions mle_options = config.kernel_fit;
  mle_options.optimize.max_evaluations = std::max(mle_options.optimize.max_evaluations, 1000);
  const KernelParams mle = fit_kernel_mle(data, family, mle_options).kernel;
  const Box box = kernel_log_box(family);

  Rng rng = make_stream(config.seed, 1);
  const int restarts = k == 1 ? 1 : std::max(config.restarts, 1);
  KmmRun best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> offsets(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < k && k > 1; ++j) {
      offsets[static_cast<std::size_t>(j)] =
          r == 0 ? -1.0 + 2.0 * j / (k - 1)
                 : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    }
    std::sort(offsets.begin(), offsets.end());
    std::vector<KernelParams> start;
    for (double decade : offsets) {
      Eigen::VectorXd x = kernel_to_log_params(mle);
      x[0] += decade * std::log(10.0);
      start.push_back(kernel_from_log_params(family, box.project(x)));
    }
    KmmRun run = start_kmm(std::move(start));
    run_kmm(data, run, std::min(kKmmScreeningIterations, config.kmm_max_iterations), config);
    if (!have_best || run.report.final_log_likelihood > best.report.final_log_likelihood) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!best.report.converged) run_kmm(data, best, config.kmm_max_iterations, config);

  std::vector<double> thetas;
  for (const auto& kp : best.kernels) thetas.push_back(kp.theta);
  const auto order = order_by(thetas);
  KmmFit fit;
  for (auto j : order) fit.mixture.components.push_back({best.kernels[j], best.weights[j]});
  fit.report = std::move(best.report);
  fit.report.restarts = restarts;
  fit.report.over_parameterized = static_cast<std::size_t>(k) > data.size();
  if (config.keep_membership) fit.report.membership = permute_columns(best.membership, order);
  return fit;
}

KSelection select_k_bmm(std::span<const std::int64_t> sizes, int k_min, int k_max,
                        const EmConfig& config) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("empty component range");
  const SizeCounts counts = compress_sizes(sizes);
  KSelection selection;
  bool have_best = false;
  for (int k = k_min; k <= k_max; ++k) {
    BmmFit fit = fit_bmm(counts, k, config);
    const double ll = fit.report.final_log_likelihood;
    const double aic = 2.0 * k - 2.0 * ll;
    selection.table.push_back({k, ll, aic});
    if (!have_best || aic < selection.table[static_cast<std::size_t>(selection.best_k - k_min)].aic) {
      selection.best_k = k;
      selection.best = std::move(fit);
      have_best = true;
    }
  }
  return selection;
}

DualMixture assemble_dual(const BorelMixture& borel, const KernelMixture& kernel) {
  DualMixture dual{borel, kernel, {}};
  dual.product.reserve(borel.components.size() * kernel.components.size());
  for (const auto& b : borel.components) {
    for (const auto& g : kernel.components) {
      dual.product.push_back({b.n_star, g.kernel, b.weight * g.weight});
    }
  }
  return dual;
}

}  // namespace dualmix
