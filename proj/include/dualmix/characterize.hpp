#pragma once

#include "dualmix/mixtures.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace dualmix {

/// Weighted means of the component parameters under their own marginal
/// weights: content virality, kernel cutoff and influence decay.
struct Summary {
  double n_star = 0.0;
  double c = 0.0;
  double theta = 0.0;
};

Summary summarize(const DualMixture& mixture);

struct WeightedSample {
  double value;
  double weight;
};

/// Quantiles of a weighted sample (Hmisc wtd.quantile with normalized
/// weights). Weights are rescaled to sum to the sample count n; the target
/// rank for level p is 1 + (n - 1) p; each rank is read off the cumulative
/// weights as a right-continuous step function and the two neighbouring
/// integer ranks are linearly interpolated. Equal weights give the usual
/// interpolated sample quantile. Throws std::invalid_argument on an empty
/// sample, a non-positive weight or a level outside [0, 1].
std::vector<double> weighted_quantiles(std::span<const WeightedSample> samples,
                                       std::span<const double> levels);

/// Quantile edges q_0 <= ... <= q_B per parameter; bin i covers
/// (q_{i-1}, q_i], values at or below q_0 fall in the first bin and values
/// above q_B in the last.
struct BinEdges {
  Eigen::VectorXd n_star;
  Eigen::VectorXd c;
  Eigen::VectorXd theta;

  int bins() const { return static_cast<int>(n_star.size()) - 1; }
  bool operator==(const BinEdges& other) const;
};

/// Edges at levels 0, 1/B, ..., 1 over the pooled components of every
/// mixture in the corpus. Kernel edges use only mixtures with kernel
/// components.
BinEdges corpus_bin_edges(std::span<const BorelMixture> borel,
                          std::span<const KernelMixture> kernel, int bins = 10);

/// Zero-based bin of `value`; sets *out_of_range when value lies beyond the
/// outer edges.
int bin_index(const Eigen::VectorXd& edges, double value, bool* out_of_range = nullptr);

struct DiffusionEmbedding {
  Eigen::VectorXd n_star;
  Eigen::VectorXd c;
  Eigen::VectorXd theta;
  BinEdges edges;
  /// A component fell outside the corpus edges and was routed to an end bin.
  bool out_of_range = false;
  /// No kernel components were available; c and theta blocks are uniform.
  bool kernel_missing = false;
};

DiffusionEmbedding build_embedding(const BorelMixture& borel, const KernelMixture& kernel,
                                   const BinEdges& edges);
DiffusionEmbedding build_embedding(const DualMixture& mixture, const BinEdges& edges);

/// sum_i |A_i - B_i| over the cumulative weights of two histograms.
double wasserstein1(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Sum of the three per-parameter W1 distances.
double embedding_distance(const DiffusionEmbedding& a, const DiffusionEmbedding& b);

/// Element-wise mean, renormalized per parameter block.
DiffusionEmbedding pool_publisher_embedding(std::span<const DiffusionEmbedding> embeddings);

}  // namespace dualmix
