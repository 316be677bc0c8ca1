#pragma once

#include "dualmix/cascade.hpp"
#include "dualmix/mixtures.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dualmix {

/// Fitted mixtures of one historical item. `kernel` is empty when the item
/// had no cascade with two or more events.
struct ItemModel {
  std::string item_id;
  BorelMixture borel;
  std::optional<KernelMixture> kernel;
  std::int64_t cascade_count = 0;
};

/// Mixtures for a publisher's next item: the union of its recent items'
/// components with weights divided by the number of items pooled.
struct PublisherModel {
  BorelMixture borel;
  KernelMixture kernel;
  DualMixture dual;
  double avg_cascades_per_item = 0.0;
  std::vector<std::string> source_items;
};

/// Re-fits each pooled item's Borel mixture (same component count) on the
/// sizes of its historical cascades that were still active at `horizon`.
struct BorelRefresh {
  double horizon = 0.0;
  /// Parallel to the pooled items.
  std::vector<std::vector<Cascade>> item_cascades;
  EmConfig em{};
};

struct PoolOptions {
  int max_items = 5;
  std::optional<BorelRefresh> refresh;
};

/// Pools the last `max_items` entries of `items` (ordered oldest first).
/// Items without a kernel mixture contribute only Borel components; kernel
/// weights are divided by the number of items that have one. Throws
/// std::invalid_argument on empty input and DataError when no pooled item
/// has a kernel mixture.
PublisherModel pool_publisher_model(std::span<const ItemModel> items,
                                    const PoolOptions& options = {});

/// Same pooling from fitted dual mixtures and per-item cascade counts.
PublisherModel pool_publisher_model(std::span<const DualMixture> item_models,
                                    std::span<const std::int64_t> cascade_counts,
                                    int max_items = 5);

/// n* sum_{t_j < T} tail(T - t_j): expected number of direct offspring after T.
double residual_intensity(BranchingFactor n_star, const KernelParams& kernel,
                          const Cascade& cascade, double horizon);

struct PosteriorOptions {
  double eps_p = 1e-10;
  /// Hard cap on the number of future events represented.
  std::int64_t max_extra = 5'000'000;
};

/// PMF over final sizes min_size, min_size + 1, ... with the truncated mass
/// reported in `truncation_bound` (1 - sum of pmf).
struct SizeDistribution {
  std::int64_t min_size = 1;
  Eigen::VectorXd pmf;
  double truncation_bound = 0.0;

  double probability(std::int64_t size) const;
  double mass() const { return pmf.sum(); }
  /// Moments of the represented (renormalized) mass.
  double mean() const;
  double variance() const;
};

/// Final-size law given the prefix observed before T: N(T) plus a
/// Poisson(Lambda)-mixed Borel-Tanner progeny. The Poisson sum stops after
/// its mode once Poi(z) < eps_p; sizes are enumerated until the remaining
/// mass drops below eps_p or max_extra is reached.
SizeDistribution posterior_size_pmf(BranchingFactor n_star, const KernelParams& kernel,
                                    const Cascade& cascade, double horizon,
                                    const PosteriorOptions& options = {});

/// N(T) + Lambda / (1 - n*).
double predict_cascade_size(BranchingFactor n_star, const KernelParams& kernel,
                            const Cascade& cascade, double horizon);

/// Variance of posterior_size_pmf (depends on eps_p through the truncation).
double predict_cascade_variance(BranchingFactor n_star, const KernelParams& kernel,
                                const Cascade& cascade, double horizon,
                                const PosteriorOptions& options = {});

struct ItemForecast {
  double mean = 0.0;
  /// Law of total variance over the dual components; cascades are
  /// independent given a component and future cascades follow a
  /// Borel-Tanner law with avg_cascades_per_item initial events.
  double variance = 0.0;
  std::int64_t observed = 0;
};

/// Expected final popularity of an item over the publisher's dual
/// components. Each observed cascade is read up to its own observed_until,
/// or `horizon` when unset.
double predict_item_popularity(const PublisherModel& model, std::span<const Cascade> observed,
                               double horizon);
ItemForecast predict_item(const PublisherModel& model, std::span<const Cascade> observed,
                          double horizon, const PosteriorOptions& options = {});

/// P[component | prefix before T] over model.dual.product.
Eigen::VectorXd component_posterior(const DualMixture& dual, const Cascade& cascade,
                                    double horizon);

struct HoldoutResult {
  double expected_hll = 0.0;
  double hll_per_event = 0.0;
  std::int64_t observed_events = 0;
  std::int64_t holdout_events = 0;
  Eigen::VectorXd posterior;
};

/// Posterior-weighted holdout log-likelihood: L(full) - L(prefix before T),
/// the full cascade integrated up to its last event plus the completion
/// horizon. Zero when nothing happens at or after T.
HoldoutResult expected_holdout_ll(const PublisherModel& model, const Cascade& full,
                                  double horizon);

/// |predicted - actual| / actual. Throws std::domain_error when actual < 1.
double absolute_relative_error(double predicted, std::int64_t actual);

}  // namespace dualmix
