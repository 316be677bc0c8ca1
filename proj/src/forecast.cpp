#include "dualmix/forecast.hpp"

#include "dualmix/errors.hpp"
#include "dualmix/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dualmix {

namespace {

std::int64_t count_before(const Cascade& cascade, double horizon) {
  const auto t = cascade.times();
  return std::lower_bound(t.begin(), t.end(), horizon) - t.begin();
}

// sum_{t_j < T} tail(T - t_j)
double tail_sum(const KernelParams& kernel, const Cascade& cascade, double horizon) {
  double total = 0.0;
  for (double t : cascade.times()) {
    if (t >= horizon) break;
    total += kernel_tail(kernel, horizon - t);
  }
  return total;
}

double horizon_of(const Cascade& cascade, double fallback) {
  return cascade.observed_until().value_or(fallback);
}

}  // namespace

PublisherModel pool_publisher_model(std::span<const ItemModel> items,
                                    const PoolOptions& options) {
  if (items.empty()) throw std::invalid_argument("no item models to pool");
  if (options.max_items < 1) throw std::invalid_argument("max_items must be >= 1");
  const auto used = std::min<std::size_t>(items.size(), static_cast<std::size_t>(options.max_items));
  const auto pooled = items.last(used);
  if (options.refresh && options.refresh->item_cascades.size() != used) {
    throw std::invalid_argument("refresh needs the cascades of every pooled item");
  }

  PublisherModel model;
  std::size_t with_kernel = 0;
  double cascades = 0.0;
  for (const auto& item : pooled) {
    if (item.kernel && !item.kernel->components.empty()) ++with_kernel;
    cascades += static_cast<double>(item.cascade_count);
  }
  if (with_kernel == 0) throw DataError("no pooled item has a kernel mixture");

  for (std::size_t i = 0; i < pooled.size(); ++i) {
    const auto& item = pooled[i];
    BorelMixture borel = item.borel;
    if (options.refresh) {
      std::vector<std::int64_t> active;
      for (const auto& c : options.refresh->item_cascades[i]) {
        if (c.last_time() >= options.refresh->horizon) active.push_back(cascade_size(c));
      }
      if (!active.empty()) {
        const int k = static_cast<int>(borel.components.size());
        borel = fit_bmm(active, k, options.refresh->em).mixture;
      }
    }
    for (const auto& c : borel.components) {
      model.borel.components.push_back({c.n_star, c.weight / static_cast<double>(used)});
    }
    if (item.kernel) {
      for (const auto& c : item.kernel->components) {
        model.kernel.components.push_back({c.kernel, c.weight / static_cast<double>(with_kernel)});
      }
    }
    model.source_items.push_back(item.item_id);
  }
  model.avg_cascades_per_item = cascades / static_cast<double>(used);
  model.dual = assemble_dual(model.borel, model.kernel);
  return model;
}

PublisherModel pool_publisher_model(std::span<const DualMixture> item_models,
                                    std::span<const std::int64_t> cascade_counts,
                                    int max_items) {
  if (item_models.size() != cascade_counts.size()) {
    throw std::invalid_argument("one cascade count per item model required");
  }
  std::vector<ItemModel> items;
  for (std::size_t i = 0; i < item_models.size(); ++i) {
    items.push_back({std::to_string(i), item_models[i].borel, item_models[i].kernel,
                     cascade_counts[i]});
  }
  return pool_publisher_model(items, PoolOptions{max_items, std::nullopt});
}

double residual_intensity(BranchingFactor n_star, const KernelParams& kernel,
                          const Cascade& cascade, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("invalid horizon: must be > 0");
  if (std::isinf(horizon)) return 0.0;
  return n_star.value() * tail_sum(kernel, cascade, horizon);
}

double SizeDistribution::probability(std::int64_t size) const {
  const auto offset = size - min_size;
  if (offset < 0 || offset >= pmf.size()) return 0.0;
  return pmf[offset];
}

double SizeDistribution::mean() const {
  const Eigen::VectorXd support =
      Eigen::VectorXd::LinSpaced(pmf.size(), 0.0, static_cast<double>(pmf.size() - 1));
  return static_cast<double>(min_size) + support.dot(pmf) / pmf.sum();
}

double SizeDistribution::variance() const {
  const Eigen::VectorXd support =
      Eigen::VectorXd::LinSpaced(pmf.size(), 0.0, static_cast<double>(pmf.size() - 1));
  const double m = support.dot(pmf) / pmf.sum();
  return (support.array() - m).square().matrix().dot(pmf) / pmf.sum();
}

SizeDistribution posterior_size_pmf(BranchingFactor n_star, const KernelParams& kernel,
                                    const Cascade& cascade, double horizon,
                                    const PosteriorOptions& options) {
  if (!(options.eps_p > 0.0 && options.eps_p < 1.0)) {
    throw std::invalid_argument("eps_p must lie in (0, 1)");
  }
  SizeDistribution out;
  out.min_size = count_before(cascade, horizon);
  const double rate = residual_intensity(n_star, kernel, cascade, horizon);
  if (rate == 0.0) {
    out.pmf = Eigen::VectorXd::Ones(1);
    return out;
  }

  // Poisson weights of the number of direct offspring.
  std::vector<double> log_poisson;
  double poisson_mass = 0.0;
  const auto mode = static_cast<std::int64_t>(std::floor(rate));
  for (std::int64_t z = 0;; ++z) {
    const double lp = poisson_log_pmf(z, rate);
    if (z > mode && std::exp(lp) < options.eps_p) break;
    log_poisson.push_back(lp);
    poisson_mass += std::exp(lp);
  }
  const auto z_max = static_cast<std::int64_t>(log_poisson.size()) - 1;

  std::vector<double> pmf;
  double cumulative = 0.0;
  for (std::int64_t extra = 0; extra <= options.max_extra; ++extra) {
    double p = 0.0;
    for (std::int64_t z = 0; z <= std::min(extra, z_max); ++z) {
      p += std::exp(log_poisson[static_cast<std::size_t>(z)] +
                    borel_tanner_log_pmf(n_star, z, extra));
    }
    pmf.push_back(p);
    cumulative += p;
    if (extra >= z_max && poisson_mass - cumulative < options.eps_p) break;
  }
  out.pmf = Eigen::Map<const Eigen::VectorXd>(pmf.data(), static_cast<Eigen::Index>(pmf.size()));
  out.truncation_bound = std::max(0.0, 1.0 - cumulative);
  return out;
}

double predict_cascade_size(BranchingFactor n_star, const KernelParams& kernel,
                            const Cascade& cascade, double horizon) {
  const double rate = residual_intensity(n_star, kernel, cascade, horizon);
  return static_cast<double>(count_before(cascade, horizon)) + rate / (1.0 - n_star.value());
}

double predict_cascade_variance(BranchingFactor n_star, const KernelParams& kernel,
                                const Cascade& cascade, double horizon,
                                const PosteriorOptions& options) {
  return posterior_size_pmf(n_star, kernel, cascade, horizon, options).variance();
}

ItemForecast predict_item(const PublisherModel& model, std::span<const Cascade> observed,
                          double horizon, const PosteriorOptions&) {
  ItemForecast forecast;
  for (const auto& c : observed) forecast.observed += count_before(c, horizon_of(c, horizon));

  double second_moment = 0.0;
  for (const auto& comp : model.dual.product) {
    const double n = comp.n_star.value();
    const double gap = 1.0 - n;
    const Moments future = borel_tanner_mean_var(comp.n_star, model.avg_cascades_per_item);
    double mean = future.mean;
    double variance = future.variance;
    for (const auto& c : observed) {
      const double h = horizon_of(c, horizon);
      const double rate = residual_intensity(comp.n_star, comp.kernel, c, h);
      mean += static_cast<double>(count_before(c, h)) + rate / gap;
      // Poisson(rate) direct offspring, each with Borel progeny.
      variance += rate / (gap * gap * gap);
    }
    forecast.mean += comp.weight * mean;
    second_moment += comp.weight * (variance + mean * mean);
  }
  forecast.variance = std::max(0.0, second_moment - forecast.mean * forecast.mean);
  return forecast;
}

double predict_item_popularity(const PublisherModel& model, std::span<const Cascade> observed,
                               double horizon) {
  return predict_item(model, observed, horizon).mean;
}

Eigen::VectorXd component_posterior(const DualMixture& dual, const Cascade& cascade,
                                    double horizon) {
  const auto k = static_cast<Eigen::Index>(dual.product.size());
  if (k == 0) throw std::invalid_argument("dual mixture has no components");
  Eigen::VectorXd log_post(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& comp = dual.product[static_cast<std::size_t>(j)];
    const double log_w = comp.weight > 0.0 ? std::log(comp.weight) : kLogZero;
    log_post[j] = log_w + full_log_likelihood({comp.n_star, comp.kernel, 0.0}, cascade, horizon);
  }
  const double peak = log_post.maxCoeff();
  if (!std::isfinite(peak)) {
    throw NumericalError("observed prefix has zero likelihood under every component");
  }
  Eigen::VectorXd post = (log_post.array() - peak).exp();
  return post / post.sum();
}

HoldoutResult expected_holdout_ll(const PublisherModel& model, const Cascade& full,
                                  double horizon) {
  const Cascade prefix = truncate(full, horizon);
  HoldoutResult result;
  result.observed_events = cascade_size(prefix);
  result.holdout_events = cascade_size(full) - result.observed_events;
  result.posterior = component_posterior(model.dual, prefix, horizon);
  if (result.holdout_events == 0) return result;

  const double end = full.last_time() + kCompletionHorizon;
  for (std::size_t j = 0; j < model.dual.product.size(); ++j) {
    const double w = result.posterior[static_cast<Eigen::Index>(j)];
    if (w == 0.0) continue;
    const auto& comp = model.dual.product[j];
    const HawkesParams p{comp.n_star, comp.kernel, 0.0};
    result.expected_hll +=
        w * (full_log_likelihood(p, full, end) - full_log_likelihood(p, prefix, horizon));
  }
  result.hll_per_event = result.expected_hll / static_cast<double>(result.holdout_events);
  return result;
}

double absolute_relative_error(double predicted, std::int64_t actual) {
  if (actual < 1) throw std::domain_error("relative error undefined for actual < 1");
  const auto a = static_cast<double>(actual);
  return std::abs(predicted - a) / a;
}

}  // namespace dualmix
